#pragma once

#include <deque>
#include <limits>
#include <optional>

#include "hilbert.hpp"

namespace entflow {

// ---------------------------------------------------------------------------
// Interaction networks
// ---------------------------------------------------------------------------

struct Edge {
    int i;
    int j;
    Mat h;  // Hermitian, size d_i * d_j, tensor order (i, j)
};

struct InteractionNetwork {
    std::vector<int> dims;
    std::vector<Edge> edges;

    InteractionNetwork() = default;
    InteractionNetwork(std::vector<int> d, std::vector<Edge> e) : dims(std::move(d)), edges(std::move(e)) {
        std::set<std::pair<int, int>> seen;
        for (const auto& ed : edges) {
            if (ed.i == ed.j) throw std::invalid_argument("network edge endpoints must differ");
            if (ed.i < 0 || ed.j < 0 || std::size_t(ed.i) >= dims.size() || std::size_t(ed.j) >= dims.size())
                throw std::invalid_argument("network edge endpoint out of range");
            auto key = std::minmax(ed.i, ed.j);
            if (!seen.insert(key).second) throw std::invalid_argument("duplicate network edge");
            Eigen::Index d = Eigen::Index(dims[ed.i]) * dims[ed.j];
            if (ed.h.rows() != d || ed.h.cols() != d) throw std::invalid_argument("edge Hamiltonian size mismatch");
            if ((ed.h - ed.h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("edge Hamiltonian is not Hermitian");
        }
    }

    int n_particles() const { return int(dims.size()); }
};

inline constexpr Eigen::Index kMaxDenseDim = 1024;  // operators materialized up to 2^10 only

/// Full Hamiltonian with each edge term embedded against identities.
inline Mat assemble_hamiltonian(const InteractionNetwork& net) {
    Eigen::Index dim = product_dim(net.dims);
    if (dim > kMaxDenseDim)
        throw std::invalid_argument("assemble_hamiltonian: dimension exceeds 2^10; use evolve (matrix-free)");
    Mat h = Mat::Zero(dim, dim);
    for (const auto& ed : net.edges) {
        std::vector<int> targets{ed.i, ed.j};
        auto toff = group_offsets(net.dims, targets);
        auto rest = complement_of(targets, net.dims.size());
        auto eoff = group_offsets(net.dims, rest);
        for (Eigen::Index e : eoff)
            for (Eigen::Index r = 0; r < Eigen::Index(toff.size()); ++r)
                for (Eigen::Index c = 0; c < Eigen::Index(toff.size()); ++c) h(e + toff[r], e + toff[c]) += ed.h(r, c);
    }
    return h;
}

/// H |psi> applied edge by edge, without materializing H.
inline Vec apply_network(const InteractionNetwork& net, const Vec& amps) {
    Vec out = Vec::Zero(amps.size());
    for (const auto& ed : net.edges) out += apply_on(net.dims, amps, ed.h, {ed.i, ed.j});
    return out;
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

struct EvolutionResult {
    std::vector<double> times;
    std::vector<PureState> states;
    std::string method;
};

namespace detail {

struct EigenPropagator {
    Eigen::SelfAdjointEigenSolver<Mat> es;
    std::vector<int> dims;

    EigenPropagator(const InteractionNetwork& net) : es(assemble_hamiltonian(net)), dims(net.dims) {}

    Vec at(const Vec& psi0, double t) const {
        Vec c = es.eigenvectors().adjoint() * psi0;
        for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::exp(cx(0, -es.eigenvalues()(k) * t));
        return es.eigenvectors() * c;
    }
};

/// One Dormand-Prince 5(4) step of dpsi/dt = -i H psi; returns error estimate.
inline double dopri_step(const InteractionNetwork& net, const Vec& y, double h, Vec& out) {
    auto f = [&](const Vec& v) { return Vec(cx(0, -1) * apply_network(net, v)); };
    Vec k1 = f(y);
    Vec k2 = f(y + h * (k1 / 5.0));
    Vec k3 = f(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    Vec k4 = f(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    Vec k5 = f(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    Vec k6 = f(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                        5103.0 / 18656.0 * k5));
    out = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6);
    Vec k7 = f(out);
    Vec err = h * ((35.0 / 384.0 - 5179.0 / 57600.0) * k1 + (500.0 / 1113.0 - 7571.0 / 16695.0) * k3 +
                   (125.0 / 192.0 - 393.0 / 640.0) * k4 + (-2187.0 / 6784.0 + 92097.0 / 339200.0) * k5 +
                   (11.0 / 84.0 - 187.0 / 2100.0) * k6 - 1.0 / 40.0 * k7);
    return err.norm();
}

inline Vec integrate_to(const InteractionNetwork& net, Vec y, double t0, double t1, double tol = 1e-11) {
    double t = t0;
    double h = std::min(1e-2, (t1 - t0) > 0 ? (t1 - t0) : 1e-2);
    while (t < t1 - 1e-15) {
        h = std::min(h, t1 - t);
        Vec next;
        double err = dopri_step(net, y, h, next);
        if (err <= tol || h < 1e-12) {
            t += h;
            y = std::move(next);
            double n = y.norm();
            if (!std::isfinite(n)) throw std::runtime_error("evolve: nonfinite state");
            y /= n;  // drift well below 1e-12 per step at this tolerance
            if (err > 0) h *= std::min(4.0, 0.9 * std::pow(tol / err, 0.2));
        } else {
            h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
        }
    }
    return y;
}

}  // namespace detail

enum class EvolveMethod { automatic, eigen, integrator };

/// Snapshots of exp(-iHt)|psi0> on the given time grid. Exact
/// eigendecomposition up to 2^10 total dimension, adaptive matrix-free
/// integration beyond.
inline EvolutionResult evolve(const InteractionNetwork& net, const PureState& psi0, const std::vector<double>& times,
                              EvolveMethod method = EvolveMethod::automatic) {
    if (psi0.dims != net.dims) throw std::invalid_argument("evolve: state dims do not match network");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (times[k] <= times[k - 1]) throw std::invalid_argument("evolve: time grid must be strictly increasing");
    Eigen::Index dim = product_dim(net.dims);
    bool use_eigen = method == EvolveMethod::eigen || (method == EvolveMethod::automatic && dim <= kMaxDenseDim);

    EvolutionResult res;
    res.times = times;
    res.method = use_eigen ? "eigendecomposition" : "dopri5";
    if (use_eigen) {
        detail::EigenPropagator prop(net);
        for (double t : times) {
            Vec v = prop.at(psi0.amps, t);
            if (!v.allFinite()) throw std::runtime_error("evolve: nonfinite state");
            res.states.emplace_back(net.dims, std::move(v));
        }
    } else {
        Vec y = psi0.amps;
        double t = 0.0;
        for (double tk : times) {
            if (tk < t) throw std::invalid_argument("evolve: integrator grid must start at t >= 0");
            y = detail::integrate_to(net, y, t, tk);
            t = tk;
            res.states.emplace_back(net.dims, y);
        }
    }
    return res;
}

/// exp(-iH dt)|psi> for a single offset (dt may be negative); dense dims only.
inline PureState propagate(const InteractionNetwork& net, const PureState& psi, double dt) {
    detail::EigenPropagator prop(net);
    return PureState(net.dims, prop.at(psi.amps, dt));
}

// ---------------------------------------------------------------------------
// Interaction-strength norms
// ---------------------------------------------------------------------------

/// l1 Pauli-coefficient norm of the two edge Hamiltonians of a three-qubit
/// chain a-b-c, with the b-side Pauli frame taken from the instantaneous
/// Schmidt basis of b and purely local terms dropped.
inline double norm_l1_schmidt(const Mat& h_ab, const Mat& h_bc, const PureState& psi) {
    if (psi.dims != std::vector<int>{2, 2, 2}) throw std::invalid_argument("norm_l1_schmidt: expects a three-qubit state");
    SchmidtData sd = schmidt_decompose(psi, {1});
    Mat v = sd.basis_left;  // columns |chi_1>, |chi_2>
    double total = 0.0;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            Mat sj = v * pauli(j) * v.adjoint();
            cx a = (h_ab * kron(pauli(i), sj)).trace() / 4.0;
            Mat si = v * pauli(i) * v.adjoint();
            cx c = (h_bc * kron(si, pauli(j))).trace() / 4.0;
            total += std::abs(a) + std::abs(c);
        }
    return total;
}

/// Sum of Hilbert-Schmidt norms of edges crossing the boundary of A or of B.
inline double norm_hs_boundary(const InteractionNetwork& net, const std::vector<int>& A, const std::vector<int>& B) {
    std::set<int> sa(A.begin(), A.end()), sb(B.begin(), B.end());
    for (int s : A)
        if (sb.count(s)) throw std::invalid_argument("norm_hs_boundary: A and B must be disjoint");
    double total = 0.0;
    for (const auto& ed : net.edges) {
        int cross_a = sa.count(ed.i) != sa.count(ed.j) ? 1 : 0;
        int cross_b = sb.count(ed.i) != sb.count(ed.j) ? 1 : 0;
        // an edge running straight from A to B crosses both boundaries and counts twice
        total += (cross_a + cross_b) * std::sqrt(ed.h.squaredNorm());
    }
    return total;
}

/// Spectral norm, the basis-independent surrogate for the max matrix element.
inline double norm_op(const Mat& h) {
    Eigen::JacobiSVD<Mat> svd(h);
    return svd.singularValues().maxCoeff();
}

inline constexpr int kUnreachable = -1;

/// BFS shortest path length in the edge graph; kUnreachable if disconnected.
inline int interaction_distance(const InteractionNetwork& net, int a, int b) {
    if (a < 0 || b < 0 || a >= net.n_particles() || b >= net.n_particles())
        throw std::invalid_argument("interaction_distance: particle out of range");
    if (a == b) return 0;
    std::vector<int> dist(net.dims.size(), -1);
    std::deque<int> q{a};
    dist[a] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& ed : net.edges) {
            int v = ed.i == u ? ed.j : (ed.j == u ? ed.i : -1);
            if (v >= 0 && dist[v] < 0) {
                dist[v] = dist[u] + 1;
                if (v == b) return dist[v];
                q.push_back(v);
            }
        }
    }
    return kUnreachable;
}

/// S plus every particle sharing an edge with S.
inline std::vector<int> neighborhood(const InteractionNetwork& net, const std::vector<int>& s) {
    std::set<int> out(s.begin(), s.end());
    for (const auto& ed : net.edges) {
        bool has_i = std::count(s.begin(), s.end(), ed.i);
        bool has_j = std::count(s.begin(), s.end(), ed.j);
        if (has_i) out.insert(ed.j);
        if (has_j) out.insert(ed.i);
    }
    return std::vector<int>(out.begin(), out.end());
}

}  // namespace entflow
