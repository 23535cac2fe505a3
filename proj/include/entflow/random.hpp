#pragma once

#include <random>

#include "types.hpp"

namespace entflow {

/// splitmix64 step, used to derive independent per-trial seeds from a campaign seed.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double gauss() { return normal_(gen_); }
    double uniform() { return unif_(gen_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unif_(gen_); }
    int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    cx cgauss() { return cx(normal_(gen_), normal_(gen_)); }

    Mat gaussian_matrix(int rows, int cols) {
        Mat m(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i) m(i, j) = cgauss();
        return m;
    }

    /// Haar-distributed unitary: QR of a Ginibre matrix with the R diagonal phase fixed.
    Mat haar_unitary(int n) {
        Mat g = gaussian_matrix(n, n);
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i) {
            cx d = r(i, i);
            double a = std::abs(d);
            q.col(i) *= (a > 0 ? d / a : cx(1, 0));
        }
        return q;
    }

    /// GUE-distributed Hermitian matrix; if unit_hs, rescaled to unit Hilbert-Schmidt norm.
    Mat gue_hermitian(int n, bool unit_hs = false) {
        Mat g = gaussian_matrix(n, n);
        Mat h = (g + g.adjoint()) / 2.0;
        if (unit_hs) {
            double hs = std::sqrt(h.squaredNorm());
            if (hs > 0) h /= hs;
        }
        return h;
    }

    /// Haar-random pure state vector of dimension n.
    Vec random_state(Eigen::Index n) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = cgauss();
        v.normalize();
        return v;
    }

    /// Random full-rank density matrix (Hilbert-Schmidt-like ensemble).
    Mat random_density(int n) {
        Mat g = gaussian_matrix(n, n);
        Mat rho = g * g.adjoint();
        rho /= rho.trace().real();
        return rho;
    }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace entflow
