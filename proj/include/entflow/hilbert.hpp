#pragma once

#include <algorithm>
#include <cmath>
#include <set>

#include "types.hpp"

namespace entflow {

// ---------------------------------------------------------------------------
// Multi-index bookkeeping
// ---------------------------------------------------------------------------

/// Row-major strides: subsystem 0 is most significant (kron convention).
inline std::vector<Eigen::Index> strides_of(const std::vector<int>& dims) {
    std::vector<Eigen::Index> s(dims.size());
    Eigen::Index acc = 1;
    for (int k = int(dims.size()) - 1; k >= 0; --k) {
        s[k] = acc;
        acc *= dims[k];
    }
    return s;
}

inline void check_subset(const std::vector<int>& subs, std::size_t n_subsystems) {
    std::set<int> seen;
    for (int s : subs) {
        if (s < 0 || std::size_t(s) >= n_subsystems) throw std::invalid_argument("subsystem index out of range");
        if (!seen.insert(s).second) throw std::invalid_argument("duplicate subsystem index");
    }
}

inline std::vector<int> complement_of(const std::vector<int>& subs, std::size_t n_subsystems) {
    std::set<int> in(subs.begin(), subs.end());
    std::vector<int> out;
    for (std::size_t k = 0; k < n_subsystems; ++k)
        if (!in.count(int(k))) out.push_back(int(k));
    return out;
}

/// Global-index offsets of every basis configuration of `subs` (other digits zero),
/// enumerated row-major in the order the subsystems are listed.
inline std::vector<Eigen::Index> group_offsets(const std::vector<int>& dims, const std::vector<int>& subs) {
    auto str = strides_of(dims);
    Eigen::Index m = 1;
    for (int s : subs) m *= dims[s];
    std::vector<Eigen::Index> off(m, 0);
    Eigen::Index block = m;
    for (int s : subs) {
        block /= dims[s];
        for (Eigen::Index k = 0; k < m; ++k) off[k] += ((k / block) % dims[s]) * str[s];
    }
    return off;
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Pure state over a register of subsystems; amplitudes kept unit-norm.
struct PureState {
    std::vector<int> dims;
    Vec amps;

    PureState() = default;
    PureState(std::vector<int> d, Vec a) : dims(std::move(d)), amps(std::move(a)) {
        if (amps.size() != product_dim(dims)) throw std::invalid_argument("amplitude length does not match dims");
        double n = amps.norm();
        if (std::abs(n - 1.0) > 1e-6) throw std::invalid_argument("state vector is not normalized");
        amps /= n;
    }

    Eigen::Index dim() const { return amps.size(); }
    int n_subsystems() const { return int(dims.size()); }
};

/// Density operator with subsystem metadata. Construction validates Hermiticity,
/// unit trace and positivity; violations beyond tolerance are errors, not repaired.
struct DensityOp {
    std::vector<int> dims;
    Mat mat;

    DensityOp() = default;
    DensityOp(std::vector<int> d, Mat m) : dims(std::move(d)), mat(std::move(m)) {
        Eigen::Index n = product_dim(dims);
        if (mat.rows() != n || mat.cols() != n) throw std::invalid_argument("density matrix size does not match dims");
        if ((mat - mat.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("density matrix is not Hermitian");
        if (std::abs(mat.trace().real() - 1.0) > 1e-10 || std::abs(mat.trace().imag()) > 1e-10)
            throw std::invalid_argument("density matrix trace is not 1");
        Eigen::SelfAdjointEigenSolver<Mat> es(mat, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("density matrix has negative eigenvalues");
    }

    Eigen::Index dim() const { return mat.rows(); }
};

inline DensityOp density_from_pure(const PureState& psi) {
    return DensityOp(psi.dims, psi.amps * psi.amps.adjoint());
}

/// Schmidt coefficients (descending) and the two orthonormal bases of a bipartition.
struct SchmidtData {
    RVec coeffs;      // descending, >= 0, sum of squares 1
    Mat basis_left;   // columns |l_i>
    Mat basis_right;  // columns |r_i>
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Apply an operator acting on the listed subsystems (tensor order as listed).
inline Vec apply_on(const std::vector<int>& dims, const Vec& amps, const Mat& op, const std::vector<int>& targets) {
    check_subset(targets, dims.size());
    auto toff = group_offsets(dims, targets);
    auto rest = complement_of(targets, dims.size());
    auto eoff = group_offsets(dims, rest);
    Eigen::Index m = Eigen::Index(toff.size());
    if (op.rows() != m || op.cols() != m) throw std::invalid_argument("operator size does not match target subsystems");
    Vec out(amps.size());
    Vec x(m);
    for (Eigen::Index e : eoff) {
        for (Eigen::Index k = 0; k < m; ++k) x(k) = amps(e + toff[k]);
        Vec y = op * x;
        for (Eigen::Index k = 0; k < m; ++k) out(e + toff[k]) = y(k);
    }
    return out;
}

inline PureState apply_on(const PureState& psi, const Mat& op, const std::vector<int>& targets) {
    Vec v = apply_on(psi.dims, psi.amps, op, targets);
    return PureState(psi.dims, std::move(v));
}

/// X = tr_{/targets} |ket><bra|, so that <bra| U_targets |ket> = tr(U X).
inline Mat transition_matrix(const std::vector<int>& dims, const Vec& ket, const Vec& bra, const std::vector<int>& targets) {
    check_subset(targets, dims.size());
    auto toff = group_offsets(dims, targets);
    auto rest = complement_of(targets, dims.size());
    auto eoff = group_offsets(dims, rest);
    Eigen::Index m = Eigen::Index(toff.size()), r = Eigen::Index(eoff.size());
    Mat K(m, r), B(m, r);
    for (Eigen::Index e = 0; e < r; ++e)
        for (Eigen::Index k = 0; k < m; ++k) {
            K(k, e) = ket(eoff[e] + toff[k]);
            B(k, e) = bra(eoff[e] + toff[k]);
        }
    return K * B.adjoint();
}

/// Partial inner product <phi|psi> over `targets`; returns a vector on the complement.
inline Vec partial_inner(const std::vector<int>& dims, const Vec& phi, const Vec& psi, const std::vector<int>& targets) {
    check_subset(targets, dims.size());
    auto toff = group_offsets(dims, targets);
    auto rest = complement_of(targets, dims.size());
    auto eoff = group_offsets(dims, rest);
    Vec w = Vec::Zero(Eigen::Index(eoff.size()));
    for (Eigen::Index e = 0; e < Eigen::Index(eoff.size()); ++e)
        for (Eigen::Index k = 0; k < Eigen::Index(toff.size()); ++k) w(e) += std::conj(phi(k)) * psi(eoff[e] + toff[k]);
    return w;
}

/// Tensor product phi (on targets) x theta (on the complement), in the global ordering.
inline Vec compose_product(const std::vector<int>& dims, const Vec& phi, const std::vector<int>& targets, const Vec& theta) {
    check_subset(targets, dims.size());
    auto toff = group_offsets(dims, targets);
    auto rest = complement_of(targets, dims.size());
    auto eoff = group_offsets(dims, rest);
    if (phi.size() != Eigen::Index(toff.size()) || theta.size() != Eigen::Index(eoff.size()))
        throw std::invalid_argument("compose_product: size mismatch");
    Vec out(Eigen::Index(toff.size()) * Eigen::Index(eoff.size()));
    for (Eigen::Index e = 0; e < Eigen::Index(eoff.size()); ++e)
        for (Eigen::Index k = 0; k < Eigen::Index(toff.size()); ++k) out(eoff[e] + toff[k]) = phi(k) * theta(e);
    return out;
}

/// Reduced operator on the kept subsystems (listed order), trace preserved.
inline DensityOp partial_trace(const DensityOp& rho, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    check_subset(keep, rho.dims.size());
    auto koff = group_offsets(rho.dims, keep);
    auto rest = complement_of(keep, rho.dims.size());
    auto eoff = group_offsets(rho.dims, rest);
    Eigen::Index m = Eigen::Index(koff.size());
    Mat out = Mat::Zero(m, m);
    for (Eigen::Index e : eoff)
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c) out(r, c) += rho.mat(e + koff[r], e + koff[c]);
    std::vector<int> kdims;
    for (int s : keep) kdims.push_back(rho.dims[s]);
    return DensityOp(kdims, std::move(out));
}

/// Reduced operator of a pure state without materializing the full projector.
inline DensityOp reduced_state(const PureState& psi, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("reduced_state: keep set must be nonempty");
    check_subset(keep, psi.dims.size());
    Mat x = transition_matrix(psi.dims, psi.amps, psi.amps, keep);
    std::vector<int> kdims;
    for (int s : keep) kdims.push_back(psi.dims[s]);
    // enforce exact Hermiticity against roundoff
    Mat h = (x + x.adjoint()) / 2.0;
    h /= h.trace().real();
    return DensityOp(kdims, std::move(h));
}

/// Schmidt decomposition across left | complement. Full orthonormal bases are
/// returned (zero coefficients padded), phases fixed so the reconstruction
/// sum_i c_i |l_i>|r_i> equals the input state.
inline SchmidtData schmidt_decompose(const PureState& psi, const std::vector<int>& left) {
    if (left.empty() || left.size() >= psi.dims.size()) throw std::invalid_argument("schmidt_decompose: left must be a proper nonempty subset");
    check_subset(left, psi.dims.size());
    auto loff = group_offsets(psi.dims, left);
    auto rest = complement_of(left, psi.dims.size());
    auto roff = group_offsets(psi.dims, rest);
    Eigen::Index m = Eigen::Index(loff.size()), n = Eigen::Index(roff.size());
    Mat M(m, n);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < n; ++c) M(r, c) = psi.amps(loff[r] + roff[c]);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SchmidtData out;
    Eigen::Index k = std::min(m, n);
    out.coeffs = svd.singularValues().head(k);
    out.basis_left = svd.matrixU();
    out.basis_right = svd.matrixV().conjugate();
    double s = out.coeffs.norm();
    if (s > 0) out.coeffs /= s;
    return out;
}

inline Vec schmidt_reconstruct(const SchmidtData& sd) {
    Eigen::Index m = sd.basis_left.rows(), n = sd.basis_right.rows();
    Vec out = Vec::Zero(m * n);
    for (Eigen::Index i = 0; i < sd.coeffs.size(); ++i) {
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < n; ++c) out(r * n + c) += sd.coeffs(i) * sd.basis_left(r, i) * sd.basis_right(c, i);
    }
    return out;
}

/// Purification on the doubled space: dims become [dims..., dim(rho)].
inline PureState purify(const DensityOp& rho) {
    Eigen::SelfAdjointEigenSolver<Mat> es(rho.mat);
    Eigen::Index n = rho.dim();
    Vec out = Vec::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = std::max(0.0, es.eigenvalues()(i));
        if (p <= 0) continue;
        double sq = std::sqrt(p);
        for (Eigen::Index r = 0; r < n; ++r) out(r * n + i) += sq * es.eigenvectors()(r, i);
    }
    std::vector<int> d = rho.dims;
    d.push_back(int(n));
    out.normalize();
    return PureState(d, std::move(out));
}

/// Polar-decomposition step behind tr|M| = max_U Re tr(U M): returns the
/// attaining unitary and the value (sum of singular values of M).
inline std::pair<Mat, double> closest_unitary_value(const Mat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("closest_unitary_value: matrix must be square");
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat u = svd.matrixV() * svd.matrixU().adjoint();
    return {u, svd.singularValues().sum()};
}

/// Sum of singular values, tr|X| with |X| = sqrt(X X^dagger).
inline double trace_abs(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues().sum();
}

}  // namespace entflow
