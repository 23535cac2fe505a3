#pragma once

#include "hilbert.hpp"
#include "random.hpp"

namespace entflow {

struct LocalUnitaryPair {
    Mat u_a;
    Mat u_b;
};

struct OptimizerConfig {
    int restarts = 8;
    double tol = 1e-10;
    int max_sweeps = 500;
    std::uint64_t seed = 0x5eed;
    bool record_trace = false;
    std::vector<LocalUnitaryPair> warm_starts;
};

struct MeasureResult {
    double value = 0.0;
    int restarts_used = 0;
    double residual = 0.0;
    std::vector<double> optimizer_trace;
    LocalUnitaryPair best;
};

namespace detail {

inline double clamp_measure(double v) {
    if (v < -1e-9 || v > 1.0 + 1e-9) throw std::runtime_error("measure value escaped [0,1] beyond tolerance");
    return std::min(1.0, std::max(0.0, v));
}

/// Alternating maximization of Re <phi x theta| U_A x U_B |psi> over U_A, U_B
/// and the extension |theta>. Returns the squared converged overlap, best over
/// restarts. `target` is a state on `target_subs` (listed order); A and B are
/// the unitary groups. The global state serves as the purification.
inline MeasureResult overlap_opt(const PureState& global, const std::vector<int>& A, const std::vector<int>& B,
                                 const std::vector<int>& target_subs, const Vec& target, const OptimizerConfig& cfg) {
    check_subset(A, global.dims.size());
    check_subset(B, global.dims.size());
    for (int s : A)
        for (int t : B)
            if (s == t) throw std::invalid_argument("A and B must be disjoint");

    Eigen::Index da = 1, db = 1;
    for (int s : A) da *= global.dims[s];
    for (int s : B) db *= global.dims[s];

    Rng rng(cfg.seed);
    MeasureResult result;
    double best = -1.0;

    auto rest = complement_of(target_subs, global.dims.size());
    Eigen::Index rest_dim = 1;
    for (int s : rest) rest_dim *= global.dims[s];

    int total_restarts = std::max(1, cfg.restarts);
    for (int r = 0; r < total_restarts; ++r) {
        Mat ua, ub;
        if (r == 0) {
            ua = Mat::Identity(da, da);
            ub = Mat::Identity(db, db);
        } else if (std::size_t(r - 1) < cfg.warm_starts.size()) {
            ua = cfg.warm_starts[r - 1].u_a;
            ub = cfg.warm_starts[r - 1].u_b;
        } else {
            ua = rng.haar_unitary(int(da));
            ub = rng.haar_unitary(int(db));
        }

        double obj = 0.0, prev = -1.0, residual = 0.0;
        std::vector<double> trace;
        for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
            // environment-extension step
            Vec rotated = apply_on(global.dims, global.amps, ua, A);
            rotated = apply_on(global.dims, rotated, ub, B);
            Vec w = partial_inner(global.dims, target, rotated, target_subs);
            double wn = w.norm();
            Vec theta = wn > 1e-300 ? Vec(w / wn) : rng.random_state(rest_dim);
            Vec chi = compose_product(global.dims, target, target_subs, theta);

            // U_A step
            Vec psi_b = apply_on(global.dims, global.amps, ub, B);
            Mat xa = transition_matrix(global.dims, psi_b, chi, A);
            auto [new_ua, va] = closest_unitary_value(xa);
            ua = new_ua;

            // U_B step
            Vec psi_a = apply_on(global.dims, global.amps, ua, A);
            Mat xb = transition_matrix(global.dims, psi_a, chi, B);
            auto [new_ub, vb] = closest_unitary_value(xb);
            ub = new_ub;

            obj = vb;
            if (cfg.record_trace) trace.push_back(obj);
            residual = obj - prev;
            if (prev >= 0 && residual < cfg.tol) break;
            prev = obj;
        }

        if (obj > best) {
            best = obj;
            result.residual = residual;
            result.best = {ua, ub};
            if (cfg.record_trace) result.optimizer_trace = std::move(trace);
        }
    }
    result.restarts_used = total_restarts;
    result.value = clamp_measure(best * best);
    return result;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Concurrence
// ---------------------------------------------------------------------------

/// Wootters concurrence of a two-qubit density operator.
inline double concurrence_2q(const DensityOp& rho) {
    if (rho.dims != std::vector<int>{2, 2}) throw std::invalid_argument("concurrence_2q: expects a two-qubit state");
    Mat sig = kron(pauli(2), pauli(2));
    Mat prod = rho.mat * sig * rho.mat.conjugate() * sig;
    Eigen::ComplexEigenSolver<Mat> es(prod);
    std::array<double, 4> mu{};
    for (int i = 0; i < 4; ++i) mu[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(mu.begin(), mu.end(), std::greater<>());
    return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

/// Concurrence of rho = X X^dagger for a 4x2 Schmidt-block matrix X, via
/// C^2 = tr(A^dagger A) - 2|det A| with A = X^T (sigma_y x sigma_y) X.
inline double concurrence_rank2(const Mat& x) {
    if (x.rows() != 4 || x.cols() != 2) throw std::invalid_argument("concurrence_rank2: expects a 4x2 matrix");
    Mat sig = kron(pauli(2), pauli(2));
    Mat a = x.transpose() * sig * x;
    double c2 = (a.adjoint() * a).trace().real() - 2.0 * std::abs(a.determinant());
    return std::sqrt(std::max(0.0, c2));
}

// ---------------------------------------------------------------------------
// Entangled fraction
// ---------------------------------------------------------------------------

/// Magic (Bell-phase) basis columns.
inline Mat magic_basis() {
    Mat e(4, 4);
    double s = 1.0 / std::sqrt(2.0);
    cx i(0, 1);
    e.col(0) << s, 0, 0, s;
    e.col(1) << -i * s, 0, 0, i * s;
    e.col(2) << 0, s, -s, 0;
    e.col(3) << 0, -i * s, -i * s, 0;
    return e;
}

/// Closed-form two-qubit entangled fraction: largest eigenvalue of the real
/// part of rho in the magic basis.
inline double entangled_fraction_2q(const Mat& rho4) {
    Mat e = magic_basis();
    Mat m = e.adjoint() * rho4 * e;
    RMat re = m.real();
    RMat sym = (re + re.transpose()) / 2.0;
    Eigen::SelfAdjointEigenSolver<RMat> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

struct Bipartition {
    std::vector<int> left;
    std::vector<int> right;
};

/// Maximum fidelity of rho with a maximally entangled state across the cut.
/// 2x2 cuts use the magic-basis closed form; larger cuts the alternating
/// optimizer over full-space local unitaries.
inline MeasureResult entangled_fraction(const DensityOp& rho, const Bipartition& cut, const OptimizerConfig& cfg = {}) {
    check_subset(cut.left, rho.dims.size());
    check_subset(cut.right, rho.dims.size());
    if (cut.left.size() + cut.right.size() != rho.dims.size())
        throw std::invalid_argument("entangled_fraction: cut must cover all subsystems");
    Eigen::Index da = 1, db = 1;
    for (int s : cut.left) da *= rho.dims[s];
    for (int s : cut.right) db *= rho.dims[s];
    if (da == 2 && db == 2 && rho.dims.size() == 2 && cut.left == std::vector<int>{0}) {
        MeasureResult r;
        r.value = detail::clamp_measure(entangled_fraction_2q(rho.mat));
        return r;
    }
    PureState psi = purify(rho);
    std::vector<int> targets = cut.left;
    targets.insert(targets.end(), cut.right.begin(), cut.right.end());
    Vec phi = max_entangled_state(int(da), int(db));
    // target lives on (left..., right...) but max_entangled_state is on da x db:
    // group_offsets enumerate (left,right) row-major, matching that layout.
    return detail::overlap_opt(psi, cut.left, cut.right, targets, phi, cfg);
}

// ---------------------------------------------------------------------------
// Generalized singlet fraction
// ---------------------------------------------------------------------------

/// Maximum singlet fidelity of the embedded qubit pair (a, b) achievable by
/// local unitaries on the groups A and B, computed through purifications.
inline MeasureResult gen_singlet_fraction(const PureState& global, const std::vector<int>& A, const std::vector<int>& B,
                                          int a, int b, const OptimizerConfig& cfg = {}) {
    if (std::find(A.begin(), A.end(), a) == A.end()) throw std::invalid_argument("gen_singlet_fraction: a must lie in A");
    if (std::find(B.begin(), B.end(), b) == B.end()) throw std::invalid_argument("gen_singlet_fraction: b must lie in B");
    if (global.dims[a] != 2 || global.dims[b] != 2) throw std::invalid_argument("gen_singlet_fraction: a and b must be qubits");
    return detail::overlap_opt(global, A, B, {a, b}, singlet_state(), cfg);
}

inline MeasureResult gen_singlet_fraction(const DensityOp& global, const std::vector<int>& A, const std::vector<int>& B,
                                          int a, int b, const OptimizerConfig& cfg = {}) {
    PureState psi = purify(global);
    if (std::find(A.begin(), A.end(), a) == A.end()) throw std::invalid_argument("gen_singlet_fraction: a must lie in A");
    if (std::find(B.begin(), B.end(), b) == B.end()) throw std::invalid_argument("gen_singlet_fraction: b must lie in B");
    if (global.dims[a] != 2 || global.dims[b] != 2) throw std::invalid_argument("gen_singlet_fraction: a and b must be qubits");
    return detail::overlap_opt(psi, A, B, {a, b}, singlet_state(), cfg);
}

// ---------------------------------------------------------------------------
// Schmidt entanglement factor
// ---------------------------------------------------------------------------

struct SchmidtFactor {
    RVec coeffs;
    double lambda_prod;  // lambda_1 * lambda_2 (0 for rank one)
    double bracket;      // (sum_i lambda_i)^2 - lambda_1^2
};

/// Entanglement factor of the middle|rest bipartition appearing in the
/// tripartite flow bound.
inline SchmidtFactor schmidt_entanglement_factor(const PureState& psi, const std::vector<int>& middle) {
    SchmidtData sd = schmidt_decompose(psi, middle);
    SchmidtFactor f;
    f.coeffs = sd.coeffs;
    double l1 = sd.coeffs.size() > 0 ? sd.coeffs(0) : 1.0;
    double l2 = sd.coeffs.size() > 1 ? sd.coeffs(1) : 0.0;
    f.lambda_prod = l1 * l2;
    double s = sd.coeffs.sum();
    f.bracket = s * s - l1 * l1;
    return f;
}

}  // namespace entflow
