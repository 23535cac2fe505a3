#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "entflow/rate_eqs.hpp"

using namespace entflow;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    return g;
}

}  // namespace

TEST_CASE("first saturated curve is the analytic sine law") {
    // K = 1: df = 2 sqrt(f) sqrt(1-f) with f(0)=1/2 has solution sin^2(t + pi/4)
    auto grid = linspace(0.0, pi / 4.0, 200);
    RateCurveSet c = saturated_curves(2, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double exact = std::pow(std::sin(grid[i] + pi / 4.0), 2);
        worst = std::max(worst, std::abs(c.curves[0][i] - exact));
    }
    CHECK(worst < 1e-6);
    // saturation: frozen at 1 afterwards
    RateCurveSet late = saturated_curves(2, linspace(0.0, 2.0, 50));
    CHECK(late.curves[0].back() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("saturated curves are monotone and ordered by level") {
    auto grid = linspace(0.0, 6.0, 300);
    RateCurveSet c = saturated_curves(8, grid);  // K = 4
    REQUIRE(c.levels() == 4);
    for (int k = 0; k < 4; ++k) {
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(c.curves[k][i] >= c.curves[k][i - 1] - 1e-12);
        CHECK(c.curves[k][0] == doctest::Approx(0.5));
    }
    // deeper levels lag: f_k <= f_{k-1}
    for (int k = 1; k < 4; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(c.curves[k][i] <= c.curves[k - 1][i] + 1e-9);
}

TEST_CASE("halving the substep changes the curves below 1e-7") {
    auto grid = linspace(0.0, 3.0, 40);
    RateCurveSet coarse = saturated_curves(6, {}, 0.5, grid, 1e-4);
    RateCurveSet fine = saturated_curves(6, {}, 0.5, grid, 5e-5);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(coarse.curves[k][i] - fine.curves[k][i]));
    CHECK(worst < 1e-7);
}

TEST_CASE("saturated_curves input validation") {
    auto grid = linspace(0.0, 1.0, 10);
    CHECK_THROWS_AS(saturated_curves(1, grid), std::invalid_argument);
    CHECK_THROWS_AS(saturated_curves(4, {1.0, 2.0, 3.0}, 0.5, grid), std::invalid_argument);
    CHECK_THROWS_AS(saturated_curves(4, {1.0, -2.0}, 0.5, grid), std::invalid_argument);
    CHECK_THROWS_AS(saturated_curves(4, {}, 0.5, {}), std::invalid_argument);
}

TEST_CASE("bound recursion gap tends to 1") {
    auto a = bound_recursion(1.0, 2000);
    CHECK(a[1] == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
    // gap deficit is 1/a_k + O(1/a_k^2); a_k lags k by ln k, so ~1.006e-3 at k = 1000
    CHECK(std::abs(a[999] - a[998] - 1.0) < 1.1e-3);
    CHECK(std::abs(a[999] - a[998] - 1.0 + 1.0 / a[998]) < 1e-5);
    CHECK(std::abs(a[1999] - a[1998] - 1.0) < 1e-3);
    // strictly increasing
    for (int k = 1; k < 2000; ++k) CHECK(a[k] > a[k - 1]);
}

TEST_CASE("upper bounds dominate the saturated curves") {
    double eps = 1e-6;
    auto grid = linspace(0.0, 8.0, 400);
    RateCurveSet sat = saturated_curves(12, grid);  // K = 6
    auto [p, up] = upper_bound_curves(6, eps, grid);
    CHECK(p.a[0] == doctest::Approx(2 * eps));
    for (int k = 0; k < 6; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(up.curves[k][i] >= sat.curves[k][i] - 1e-6);
}

TEST_CASE("lower bounds stay below the saturated curves") {
    auto grid = linspace(0.0, 8.0, 400);
    RateCurveSet sat = saturated_curves(12, grid);
    auto [p, lo] = lower_bound_curves(6, grid);
    CHECK(p.a[0] == doctest::Approx(kLowerBoundA1));
    for (int k = 0; k < 6; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(lo.curves[k][i] <= sat.curves[k][i] + 1e-6);
}

TEST_CASE("base constant of the lower-bound family is tight against sin(2t)") {
    // t^2/a_1 <= sin(2t) on [0, pi/4], with equality at the right endpoint
    for (double t = 0.0; t <= pi / 4.0 + 1e-12; t += 1e-3)
        CHECK(t * t / kLowerBoundA1 <= std::sin(2.0 * t) + 1e-12);
    double t = pi / 4.0;
    CHECK(t * t / kLowerBoundA1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("t_ent interpolates the threshold crossing") {
    RateCurveSet c;
    c.times = {0.0, 1.0, 2.0};
    c.curves = {{0.5, 0.9, 1.0}};
    auto t = t_ent(c, 1, 0.95);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(!t_ent(c, 1, 1.1).has_value());
    CHECK_THROWS_AS(t_ent(c, 2), std::invalid_argument);
}

TEST_CASE("scaling experiment stays between the square-root bounds") {
    auto rows = scaling_experiment({10, 20, 40}, 1e-3);
    double prev = 0.0;
    for (const auto& r : rows) {
        CHECK(r.t_lower == doctest::Approx(std::sqrt((r.L / 2) / 2.0)));
        CHECK(r.t_upper == doctest::Approx(std::sqrt(double(r.L / 2))));
        CHECK(r.t_numeric >= r.t_lower);
        CHECK(r.t_numeric <= r.t_upper);
        CHECK(r.t_numeric > prev);
        prev = r.t_numeric;
    }
    CHECK_THROWS_AS(scaling_experiment({3}), std::invalid_argument);
}
