#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace entflow {

using cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;

inline Mat pauli(int k) {
    Mat s(2, 2);
    switch (k) {
        case 0: s << 1, 0, 0, 1; break;
        case 1: s << 0, 1, 1, 0; break;
        case 2: s << 0, cx(0, -1), cx(0, 1), 0; break;
        case 3: s << 1, 0, 0, -1; break;
        default: throw std::invalid_argument("pauli index out of range");
    }
    return s;
}

inline Eigen::Index product_dim(const std::vector<int>& dims) {
    Eigen::Index d = 1;
    for (int x : dims) {
        if (x < 2) throw std::invalid_argument("subsystem dimension must be >= 2");
        d *= x;
    }
    return d;
}

/// Singlet state (|01> - |10>)/sqrt(2) on two qubits.
inline Vec singlet_state() {
    Vec v = Vec::Zero(4);
    v(1) = 1.0 / std::sqrt(2.0);
    v(2) = -1.0 / std::sqrt(2.0);
    return v;
}

/// Maximally entangled state sum_i |ii>/sqrt(n) on da x db, n = min(da, db).
inline Vec max_entangled_state(int da, int db) {
    int n = std::min(da, db);
    Vec v = Vec::Zero(static_cast<Eigen::Index>(da) * db);
    for (int i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i) * db + i) = 1.0 / std::sqrt(double(n));
    return v;
}

}  // namespace entflow
