#pragma once

#include <functional>
#include <optional>
#include <string>

#include "types.hpp"

namespace entflow {

// ---------------------------------------------------------------------------
// Curve containers
// ---------------------------------------------------------------------------

struct RateCurveSet {
    std::vector<double> times;
    std::vector<std::vector<double>> curves;  // curves[k][t_index], k = 0 is level 1
    std::vector<double> couplings;
    std::string kind;  // saturated | upper | lower | simulated

    int levels() const { return int(curves.size()); }
};

struct BoundParams {
    double eps = 0.0;
    std::vector<double> a;  // a_1 ... a_K, strictly positive and increasing
};

// ---------------------------------------------------------------------------
// Saturated rate-equation curves
// ---------------------------------------------------------------------------

namespace detail {

/// Right-hand side of the saturated system: df_k = 2 c_k sqrt(f_k) sqrt(f_{k-1} - f_k)
/// with f_0 = 1, negative radicands clamped, curves frozen once at 1.
inline void saturated_rhs(const std::vector<double>& c, const std::vector<double>& f, std::vector<double>& df) {
    int K = int(f.size());
    for (int k = 0; k < K; ++k) {
        double prev = k == 0 ? 1.0 : f[k - 1];
        if (f[k] >= 1.0 - 1e-12) {
            df[k] = 0.0;
            continue;
        }
        double rad = std::max(0.0, prev - f[k]);
        df[k] = 2.0 * c[k] * std::sqrt(std::max(0.0, f[k])) * std::sqrt(rad);
    }
}

}  // namespace detail

/// Curves f_k saturating the rate equations for interaction distance d,
/// integrated with fixed-substep RK4 onto the requested grid.
inline RateCurveSet saturated_curves(int d, const std::vector<double>& couplings, double f_init,
                                     const std::vector<double>& grid, double substep = 1e-4) {
    if (d < 2) throw std::invalid_argument("saturated_curves: interaction distance must be >= 2");
    int K = d / 2;
    std::vector<double> c(K, 1.0);
    if (!couplings.empty()) {
        if (int(couplings.size()) != K) throw std::invalid_argument("saturated_curves: couplings size must equal floor(d/2)");
        c = couplings;
    }
    for (double x : c)
        if (x <= 0) throw std::invalid_argument("saturated_curves: couplings must be positive");
    if (grid.empty() || grid.front() < 0) throw std::invalid_argument("saturated_curves: bad time grid");

    RateCurveSet out;
    out.times = grid;
    out.couplings = c;
    out.kind = "saturated";
    out.curves.assign(K, std::vector<double>(grid.size()));

    std::vector<double> f(K, f_init), k1(K), k2(K), k3(K), k4(K), tmp(K);
    double t = 0.0;
    auto freeze = [&](std::vector<double>& v) {
        for (double& x : v) x = x >= 1.0 - 1e-12 ? 1.0 : x;
    };
    std::size_t gi = 0;
    // record any grid point at t = 0
    while (gi < grid.size() && grid[gi] <= t + 1e-15) {
        for (int k = 0; k < K; ++k) out.curves[k][gi] = f[k];
        ++gi;
    }
    while (gi < grid.size()) {
        double target = grid[gi];
        while (t < target - 1e-15) {
            double h = std::min(substep, target - t);
            detail::saturated_rhs(c, f, k1);
            for (int k = 0; k < K; ++k) tmp[k] = f[k] + 0.5 * h * k1[k];
            detail::saturated_rhs(c, tmp, k2);
            for (int k = 0; k < K; ++k) tmp[k] = f[k] + 0.5 * h * k2[k];
            detail::saturated_rhs(c, tmp, k3);
            for (int k = 0; k < K; ++k) tmp[k] = f[k] + h * k3[k];
            detail::saturated_rhs(c, tmp, k4);
            for (int k = 0; k < K; ++k) f[k] = std::min(1.0, f[k] + h / 6.0 * (k1[k] + 2 * k2[k] + 2 * k3[k] + k4[k]));
            freeze(f);
            t += h;
        }
        for (int k = 0; k < K; ++k) out.curves[k][gi] = f[k];
        ++gi;
    }
    return out;
}

inline RateCurveSet saturated_curves(int d, const std::vector<double>& grid) { return saturated_curves(d, {}, 0.5, grid); }

// ---------------------------------------------------------------------------
// Analytic bound curves
// ---------------------------------------------------------------------------

/// a_{k+1} = a_k/2 + (a_k/2) sqrt(1 + 4/a_k), starting from a_1.
inline std::vector<double> bound_recursion(double a1, int K) {
    if (a1 <= 0) throw std::invalid_argument("bound_recursion: a_1 must be positive");
    std::vector<double> a(K);
    a[0] = a1;
    for (int k = 1; k < K; ++k) a[k] = a[k - 1] / 2.0 + (a[k - 1] / 2.0) * std::sqrt(1.0 + 4.0 / a[k - 1]);
    return a;
}

/// Upper-bound family u_k(t) = t^2/a_k + (1+eps)/2 with a_1 = 2 eps.
inline std::pair<BoundParams, RateCurveSet> upper_bound_curves(int K, double eps, const std::vector<double>& grid) {
    if (eps <= 0) throw std::invalid_argument("upper_bound_curves: eps must be positive");
    if (K < 1) throw std::invalid_argument("upper_bound_curves: K must be >= 1");
    BoundParams p;
    p.eps = eps;
    p.a = bound_recursion(2.0 * eps, K);
    RateCurveSet out;
    out.times = grid;
    out.kind = "upper";
    out.curves.assign(K, std::vector<double>(grid.size()));
    for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) out.curves[k][i] = grid[i] * grid[i] / p.a[k] + (1.0 + eps) / 2.0;
    return {p, out};
}

/// Base constant for the lower-bound family: the largest a_1 with
/// t^2/a_1 <= sin(2t) on [0, pi/4], binding at t = pi/4.
inline constexpr double kLowerBoundA1 = pi * pi / 16.0;

/// Lower-bound family l_k(t) = (t/sqrt(2))^2/a_k + 1/2, clamped at 1.
inline std::pair<BoundParams, RateCurveSet> lower_bound_curves(int K, const std::vector<double>& grid) {
    if (K < 1) throw std::invalid_argument("lower_bound_curves: K must be >= 1");
    BoundParams p;
    p.eps = 0.0;
    p.a = bound_recursion(kLowerBoundA1, K);
    RateCurveSet out;
    out.times = grid;
    out.kind = "lower";
    out.curves.assign(K, std::vector<double>(grid.size()));
    for (int k = 0; k < K; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double tau = grid[i] / std::sqrt(2.0);
            out.curves[k][i] = std::min(1.0, tau * tau / p.a[k] + 0.5);
        }
    return {p, out};
}

// ---------------------------------------------------------------------------
// Entanglement-time extraction and scaling
// ---------------------------------------------------------------------------

/// First (linearly interpolated) time the level-k curve crosses the threshold.
inline std::optional<double> t_ent(const RateCurveSet& curves, int level, double threshold = 1.0 - 1e-6) {
    if (level < 1 || level > curves.levels()) throw std::invalid_argument("t_ent: no such level");
    const auto& f = curves.curves[level - 1];
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] >= threshold) {
            if (i == 0) return curves.times[0];
            double t0 = curves.times[i - 1], t1 = curves.times[i];
            double f0 = f[i - 1], f1 = f[i];
            if (f1 <= f0) return t1;
            return t0 + (threshold - f0) / (f1 - f0) * (t1 - t0);
        }
    }
    return std::nullopt;
}

struct ScalingRow {
    int L;
    double t_numeric;
    double t_lower;  // sqrt(floor(L/2)/2)
    double t_upper;  // sqrt(floor(L/2))
};

/// Numeric saturated-curve entanglement times against the analytic square-root
/// bounds, one row per chain length.
inline std::vector<ScalingRow> scaling_experiment(const std::vector<int>& lengths, double substep = 1e-4,
                                                  double threshold = 1.0 - 1e-6) {
    std::vector<ScalingRow> rows;
    for (int L : lengths) {
        if (L < 4) throw std::invalid_argument("scaling_experiment: chain length must be >= 4");
        int K = L / 2;
        double t_hi = std::sqrt(double(K)) * 1.5 + 1.0;
        std::vector<double> grid;
        for (double t = 0.0; t <= t_hi; t += 1e-3 * t_hi) grid.push_back(t);
        RateCurveSet sat = saturated_curves(2 * K, {}, 0.5, grid, substep);
        auto tn = t_ent(sat, K, threshold);
        if (!tn) throw std::runtime_error("scaling_experiment: saturated curve never crossed threshold");
        rows.push_back({L, *tn, std::sqrt(K / 2.0), std::sqrt(double(K))});
    }
    return rows;
}

}  // namespace entflow
