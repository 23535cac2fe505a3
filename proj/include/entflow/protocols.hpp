#pragma once

#include "dynamics.hpp"
#include "measures.hpp"
#include "rate_eqs.hpp"

namespace entflow {

struct Segment {
    InteractionNetwork net;
    double duration;
};

struct LevelSets {
    std::vector<std::vector<int>> A;  // A[k-1] for level k, concentric, shrinking
    std::vector<std::vector<int>> B;
    int a;  // end qubit inside every A_k
    int b;
};

/// Concentric set pairs of a chain 0..L-1: level 1 is the two halves, level
/// floor(L/2) the end qubits themselves. Odd chains leave the center qubit out.
inline LevelSets chain_level_sets(int L) {
    int m = L / 2;
    LevelSets ls;
    ls.a = 0;
    ls.b = L - 1;
    for (int k = 1; k <= m; ++k) {
        std::vector<int> A, B;
        for (int s = 0; s <= m - k; ++s) A.push_back(s);
        for (int s = L - 1 - (m - k); s <= L - 1; ++s) B.push_back(s);
        ls.A.push_back(A);
        ls.B.push_back(B);
    }
    return ls;
}

struct ProtocolRun {
    std::string protocol;
    int L = 0;
    std::vector<Segment> schedule;
    PureState psi0;
    LevelSets levels;
    RateCurveSet tracked;  // kind "simulated"
    std::optional<double> t_ent;
    double final_end_fraction = 0.0;
};

namespace detail {

inline void validate_concentric(const LevelSets& ls) {
    auto contains = [](const std::vector<int>& big, const std::vector<int>& small) {
        for (int s : small)
            if (!std::count(big.begin(), big.end(), s)) return false;
        return true;
    };
    for (std::size_t k = 1; k < ls.A.size(); ++k)
        if (!contains(ls.A[k - 1], ls.A[k]) || !contains(ls.B[k - 1], ls.B[k]))
            throw std::invalid_argument("track_fractions: level sets must be concentric");
    for (const auto& A : ls.A)
        if (!std::count(A.begin(), A.end(), ls.a)) throw std::invalid_argument("track_fractions: a must lie in every A_k");
    for (const auto& B : ls.B)
        if (!std::count(B.begin(), B.end(), ls.b)) throw std::invalid_argument("track_fractions: b must lie in every B_k");
}

}  // namespace detail

/// Generalized singlet fraction of every level pair, sampled along the
/// schedule. The optimizer warm-starts from the previous sample's unitaries.
inline RateCurveSet track_fractions(const std::vector<Segment>& schedule, const PureState& psi0, const LevelSets& ls,
                                    int samples_per_segment = 200, OptimizerConfig cfg = {}) {
    detail::validate_concentric(ls);
    int K = int(ls.A.size());
    RateCurveSet out;
    out.kind = "simulated";
    out.curves.assign(K, {});
    std::vector<std::vector<LocalUnitaryPair>> warm(K);

    PureState psi = psi0;
    double t_base = 0.0;
    bool first = true;
    for (const auto& seg : schedule) {
        if (seg.duration <= 0) throw std::invalid_argument("track_fractions: segment durations must be positive");
        detail::EigenPropagator prop(seg.net);
        for (int s = first ? 0 : 1; s <= samples_per_segment; ++s) {
            double tau = seg.duration * s / samples_per_segment;
            PureState snap(psi.dims, prop.at(psi.amps, tau));
            out.times.push_back(t_base + tau);
            for (int k = 0; k < K; ++k) {
                OptimizerConfig c = cfg;
                c.warm_starts = warm[k];
                c.seed = split_seed(cfg.seed, out.times.size() * 131 + k);
                MeasureResult r = gen_singlet_fraction(snap, ls.A[k], ls.B[k], ls.a, ls.b, c);
                warm[k] = {r.best};
                out.curves[k].push_back(r.value);
            }
        }
        psi = PureState(psi.dims, prop.at(psi.amps, seg.duration));
        t_base += seg.duration;
        first = false;
    }
    return out;
}

namespace detail {

inline InteractionNetwork chain_edges(int L, const std::vector<std::tuple<int, int, Mat>>& terms) {
    std::vector<Edge> edges;
    for (const auto& [i, j, h] : terms) edges.push_back({i, j, h});
    return InteractionNetwork(std::vector<int>(L, 2), std::move(edges));
}

inline void finish_run(ProtocolRun& run, int samples_per_segment, const OptimizerConfig& cfg) {
    run.tracked = track_fractions(run.schedule, run.psi0, run.levels, samples_per_segment, cfg);
    int K = run.tracked.levels();
    run.final_end_fraction = run.tracked.curves[K - 1].back();
    for (std::size_t i = 0; i < run.tracked.times.size(); ++i) {
        if (run.tracked.curves[K - 1][i] >= 0.99) {
            run.t_ent = run.tracked.times[i];
            break;
        }
    }
}

}  // namespace detail

/// Entangle the middle pair, then move both halves of the pair to the chain
/// ends by successive exchange (swap) segments.
inline ProtocolRun swap_protocol(int L, int samples_per_segment = 200, OptimizerConfig cfg = {}) {
    if (L < 4) throw std::invalid_argument("swap_protocol: L must be >= 4");
    ProtocolRun run;
    run.protocol = "swap";
    run.L = L;
    run.levels = chain_level_sets(L);

    Mat xx = kron(pauli(1), pauli(1));
    Mat heis = kron(pauli(1), pauli(1)) + kron(pauli(2), pauli(2)) + kron(pauli(3), pauli(3));
    int p1 = (L - 1) / 2, p2 = p1 + 1;

    run.schedule.push_back({detail::chain_edges(L, {{p1, p2, xx}}), pi / 4});
    while (p1 > 0 || p2 < L - 1) {
        std::vector<std::tuple<int, int, Mat>> terms;
        if (p1 > 0) terms.push_back({p1 - 1, p1, heis});
        if (p2 < L - 1) terms.push_back({p2, p2 + 1, heis});
        run.schedule.push_back({detail::chain_edges(L, terms), pi / 4});
        if (p1 > 0) --p1;
        if (p2 < L - 1) ++p2;
    }

    Vec v = Vec::Zero(Eigen::Index(1) << L);
    v(0) = 1.0;
    run.psi0 = PureState(std::vector<int>(L, 2), std::move(v));
    detail::finish_run(run, samples_per_segment, cfg);
    return run;
}

/// Mirror time of the perfect-transfer coupling pattern with the strongest
/// coupling normalized to 1.
inline double engineered_transfer_time(int L) {
    double cmax = std::sqrt(double(L / 2) * ((L + 1) / 2));
    return pi / 2.0 * cmax;
}

/// Single constant-Hamiltonian entanglement generation on an odd chain:
/// excitation-preserving XY couplings J_i ~ sqrt(i(L-i)), both end qubits
/// prepared in |+>. At the mirror time the ends hold a maximally entangled
/// pair.
inline ProtocolRun engineered_chain(int L, int samples_per_segment = 200, OptimizerConfig cfg = {}) {
    if (L % 2 == 0) throw std::invalid_argument("engineered_chain: L must be odd");
    if (L < 5) throw std::invalid_argument("engineered_chain: L must be >= 5");
    ProtocolRun run;
    run.protocol = "engineered";
    run.L = L;
    run.levels = chain_level_sets(L);

    double cmax = std::sqrt(double(L / 2) * ((L + 1) / 2));
    Mat hop = (kron(pauli(1), pauli(1)) + kron(pauli(2), pauli(2))) / 2.0;
    std::vector<std::tuple<int, int, Mat>> terms;
    for (int i = 1; i < L; ++i) {
        double j = std::sqrt(double(i) * (L - i)) / cmax;
        terms.push_back({i - 1, i, Mat(j * hop)});
    }
    run.schedule.push_back({detail::chain_edges(L, terms), engineered_transfer_time(L)});

    // |+> 0...0 |+>
    Vec plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    Vec v = Vec::Ones(1);
    for (int s = 0; s < L; ++s) {
        Vec site = (s == 0 || s == L - 1) ? plus : Vec(Vec::Zero(2));
        if (!(s == 0 || s == L - 1)) site(0) = 1.0;
        Vec next(v.size() * 2);
        for (Eigen::Index r = 0; r < v.size(); ++r)
            for (int q = 0; q < 2; ++q) next(r * 2 + q) = v(r) * site(q);
        v = next;
    }
    run.psi0 = PureState(std::vector<int>(L, 2), std::move(v));
    detail::finish_run(run, samples_per_segment, cfg);
    return run;
}

/// Saturated envelope for a protocol run: per-level couplings are the largest
/// boundary norms over the schedule's segments.
inline RateCurveSet protocol_envelope(const ProtocolRun& run) {
    int K = int(run.levels.A.size());
    std::vector<double> c(K, 0.0);
    for (const auto& seg : run.schedule)
        for (int k = 0; k < K; ++k) c[k] = std::max(c[k], norm_hs_boundary(seg.net, run.levels.A[k], run.levels.B[k]));
    for (double& x : c) x = std::max(x, 1e-12);
    return saturated_curves(2 * K, c, 0.5, run.tracked.times, 2e-4);
}

}  // namespace entflow
