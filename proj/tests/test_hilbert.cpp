#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entflow/hilbert.hpp"
#include "entflow/random.hpp"

using namespace entflow;

namespace {

double matdiff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("kron of sigma_y with itself is the antidiagonal sign matrix") {
    Mat s = kron(pauli(2), pauli(2));
    Mat expected(4, 4);
    expected << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
    CHECK(matdiff(s, expected) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("group offsets enumerate row-major with subsystem 0 most significant") {
    std::vector<int> dims{2, 3, 2};
    auto off = group_offsets(dims, {0, 2});
    // offsets for (i0, i2): i0*6 + i2
    CHECK(off == std::vector<Eigen::Index>{0, 1, 6, 7});
    auto off2 = group_offsets(dims, {2, 0});
    CHECK(off2 == std::vector<Eigen::Index>{0, 6, 1, 7});
}

TEST_CASE("pure state constructor rejects unnormalized vectors") {
    Vec v = Vec::Ones(4);
    CHECK_THROWS_AS(PureState({2, 2}, v), std::invalid_argument);
    Vec w = Vec::Zero(4);
    w(0) = 1.0 + 5e-7;  // inside tolerance, renormalized
    PureState s({2, 2}, w);
    CHECK(s.amps.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("density operator constructor validates") {
    Mat ok = Mat::Identity(4, 4) / 4.0;
    CHECK_NOTHROW(DensityOp({2, 2}, ok));
    Mat bad_trace = Mat::Identity(4, 4);
    CHECK_THROWS_AS(DensityOp({2, 2}, bad_trace), std::invalid_argument);
    Mat nonherm = ok;
    nonherm(0, 1) = cx(0.1, 0.0);
    CHECK_THROWS_AS(DensityOp({2, 2}, nonherm), std::invalid_argument);
    Mat neg = Mat::Zero(4, 4);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityOp({2, 2}, neg), std::invalid_argument);
}

TEST_CASE("apply_on matches dense kron embedding") {
    Rng rng(11);
    std::vector<int> dims{2, 3, 2};
    Vec psi = rng.random_state(12);
    Mat op = rng.gaussian_matrix(6, 6);  // acts on subsystems 1,2
    Mat dense = kron(Mat::Identity(2, 2), op);
    Vec a = apply_on(dims, psi, op, {1, 2});
    Vec b = dense * psi;
    CHECK((a - b).norm() == doctest::Approx(0.0).epsilon(1e-12));

    // listed order matters: op on {2,1} is the swapped embedding
    Mat swap(6, 6);
    swap.setZero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) swap(j * 3 + i, i * 2 + j) = 1.0;
    Vec c = apply_on(dims, psi, op, {2, 1});
    Vec d = kron(Mat::Identity(2, 2), Mat(swap.transpose() * op * swap)) * psi;
    CHECK((c - d).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("partial trace of the three-qubit W state gives concurrence-relevant 2/3 coherences") {
    Vec w = Vec::Zero(8);
    w(1) = w(2) = w(4) = 1.0 / std::sqrt(3.0);
    PureState psi({2, 2, 2}, w);
    DensityOp rho = reduced_state(psi, {0, 1});
    // rho = 1/3 (|00><00| + (|01>+|10>)(<01|+<10|))
    CHECK(rho.mat(0, 0).real() == doctest::Approx(1.0 / 3.0));
    CHECK(rho.mat(1, 2).real() == doctest::Approx(1.0 / 3.0));
    CHECK(rho.mat(3, 3).real() == doctest::Approx(0.0));
    // consistency with partial_trace on the dense projector
    DensityOp rho2 = partial_trace(density_from_pure(psi), {0, 1});
    CHECK((rho.mat - rho2.mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("partial trace preserves trace and positivity on random mixed states") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<int> dims{2, 3, 2};
        DensityOp rho(dims, rng.random_density(12));
        DensityOp red = partial_trace(rho, {1});
        CHECK(red.mat.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
        Eigen::SelfAdjointEigenSolver<Mat> es(red.mat, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("schmidt decomposition reconstructs the state: randomized property") {
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        int n = rng.uniform_int(2, 4);
        std::vector<int> dims;
        Eigen::Index total = 1;
        for (int k = 0; k < n; ++k) {
            int d = rng.uniform_int(2, 3);
            if (total * d > 16) d = 2;
            if (total * d > 16) break;
            dims.push_back(d);
            total *= d;
        }
        if (dims.size() < 2) dims = {2, 2}, total = 4;
        PureState psi(dims, rng.random_state(total));
        int nl = rng.uniform_int(1, int(dims.size()) - 1);
        std::vector<int> left;
        // random distinct subsystems
        std::vector<int> all(dims.size());
        std::iota(all.begin(), all.end(), 0);
        std::shuffle(all.begin(), all.end(), rng.engine());
        left.assign(all.begin(), all.begin() + nl);
        std::sort(left.begin(), left.end());

        SchmidtData sd = schmidt_decompose(psi, left);
        // coefficients descending, unit square sum
        for (Eigen::Index i = 1; i < sd.coeffs.size(); ++i) CHECK(sd.coeffs(i) <= sd.coeffs(i - 1) + 1e-12);
        CHECK(sd.coeffs.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
        // bases orthonormal
        CHECK((sd.basis_left.adjoint() * sd.basis_left - Mat::Identity(sd.basis_left.cols(), sd.basis_left.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        CHECK((sd.basis_right.adjoint() * sd.basis_right - Mat::Identity(sd.basis_right.cols(), sd.basis_right.cols()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        // reconstruction in (left, complement) ordering
        Vec rec = schmidt_reconstruct(sd);
        auto loff = group_offsets(dims, left);
        auto roff = group_offsets(dims, complement_of(left, dims.size()));
        Vec perm(psi.amps.size());
        for (std::size_t r = 0; r < loff.size(); ++r)
            for (std::size_t c = 0; c < roff.size(); ++c) perm(Eigen::Index(r * roff.size() + c)) = psi.amps(loff[r] + roff[c]);
        CHECK((rec - perm).norm() < 1e-10);
    }
}

TEST_CASE("purification reduces back to the original density operator") {
    Rng rng(41);
    for (int trial = 0; trial < 50; ++trial) {
        DensityOp rho({2, 2}, rng.random_density(4));
        PureState psi = purify(rho);
        REQUIRE(psi.dims.size() == 3);
        CHECK(psi.dims[2] == 4);
        DensityOp back = reduced_state(psi, {0, 1});
        CHECK((back.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("closest unitary attains the trace norm and dominates random unitaries") {
    Rng rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        int n = rng.uniform_int(2, 5);
        Mat m = rng.gaussian_matrix(n, n);
        auto [u, val] = closest_unitary_value(m);
        CHECK((u.adjoint() * u - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((u * m).trace().real() == doctest::Approx(val).epsilon(1e-10));
        CHECK(val == doctest::Approx(trace_abs(m)).epsilon(1e-10));
        for (int k = 0; k < 100; ++k) {
            Mat v = rng.haar_unitary(n);
            CHECK((v * m).trace().real() <= val + 1e-10);
        }
    }
}

TEST_CASE("transition matrix realizes <bra|U|ket> = tr(U X)") {
    Rng rng(61);
    std::vector<int> dims{2, 2, 3};
    Vec ket = rng.random_state(12), bra = rng.random_state(12);
    Mat x = transition_matrix(dims, ket, bra, {0, 2});
    for (int k = 0; k < 20; ++k) {
        Mat u = rng.haar_unitary(6);
        cx lhs = bra.adjoint() * apply_on(dims, ket, u, {0, 2});
        cx rhs = (u * x).trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("partial inner and compose_product are adjoint operations") {
    Rng rng(71);
    std::vector<int> dims{2, 3, 2};
    Vec psi = rng.random_state(12);
    Vec phi = rng.random_state(6);  // on {1, 2}
    Vec w = partial_inner(dims, phi, psi, {1, 2});
    REQUIRE(w.size() == 2);
    // <phi x theta | psi> = <theta | w>
    for (int k = 0; k < 10; ++k) {
        Vec theta = rng.random_state(2);
        Vec chi = compose_product(dims, phi, {1, 2}, theta);
        cx lhs = chi.adjoint() * psi;
        cx rhs = theta.adjoint() * w;
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}
