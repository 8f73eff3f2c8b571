#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "golden.hpp"
#include "hrt/kernels.hpp"
#include "hrt/linalg.hpp"
#include "util.hpp"

using namespace hrt;

TEST_CASE("solve_ridge interpolates constant data exactly") {
    DesignMatrix m(1);
    m.add_row(std::vector<double>{0.0}, 2.0);
    m.add_row(std::vector<double>{1.0}, 2.0);
    const CoefVector t = solve_ridge(m, 0.0);
    CHECK(t[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("huge ridge crushes the slope but leaves the bias at the target mean") {
    DesignMatrix m(1);
    m.add_row(std::vector<double>{0.0}, 0.0);
    m.add_row(std::vector<double>{1.0}, 3.0);
    const CoefVector t = solve_ridge(m, 1e9);
    CHECK(std::abs(t[0]) < 1e-6);
    CHECK(t[1] == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("ridge solution matches the high-precision oracle") {
    DesignMatrix m(2);
    for (int i = 0; i < 6; ++i)
        m.add_row(std::span(golden::kRidgeRows[i], 2), golden::kRidgeTargets[i]);
    const CoefVector t = solve_ridge(m, 0.1);
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(t[static_cast<std::size_t>(k)] - golden::kRidgeTheta[k]) <=
              1e-10 * std::abs(golden::kRidgeTheta[k]));
}

TEST_CASE("spd_solve identity and diagonal systems") {
    const std::vector<double> eye{1, 0, 0, 1};
    const std::vector<double> b{0.25, -3.5};
    CHECK(spd_solve(eye, b, 2) == b);

    const std::vector<double> diag{2, 0, 0, 4};
    const std::vector<double> b2{2, 8};
    const auto x = spd_solve(diag, b2, 2);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("spd_solve 5x5 residual against the oracle system") {
    const std::vector<double> a(golden::kSpdA, golden::kSpdA + 25);
    const std::vector<double> b(golden::kSpdB, golden::kSpdB + 5);
    const auto x = spd_solve(a, b, 5);

    double bnorm = 0.0, rnorm = 0.0;
    for (int i = 0; i < 5; ++i) {
        double ax = 0.0;
        for (int j = 0; j < 5; ++j) ax += a[static_cast<std::size_t>(i) * 5 + j] * x[static_cast<std::size_t>(j)];
        rnorm += (ax - b[static_cast<std::size_t>(i)]) * (ax - b[static_cast<std::size_t>(i)]);
        bnorm += b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i)];
    }
    CHECK(std::sqrt(rnorm) <= 1e-10 * std::sqrt(bnorm));

    for (int i = 0; i < 5; ++i)
        CHECK(x[static_cast<std::size_t>(i)] ==
              doctest::Approx(golden::kSpdX[i]).epsilon(1e-10));
}

TEST_CASE("spd_solve rejects an indefinite matrix") {
    const std::vector<double> a{1, 2, 2, 1};   // eigenvalues 3 and -1
    const std::vector<double> b{1, 1};
    CHECK_THROWS_AS(spd_solve(a, b, 2), NotPositiveDefinite);
}

TEST_CASE("SingularSystem is raised when the jitter retry cannot help") {
    // an all-zero normal system has zero trace, so the retry adds nothing
    kernels::Gram g;
    g.p = 2;
    g.xtx.assign(4, 0.0);
    g.xty.assign(2, 0.0);
    CHECK_THROWS_AS(solve_ridge_gram(g, 0.0), SingularSystem);
}

TEST_CASE("a constant zero feature is absorbed by the jitter retry") {
    // the normal matrix is singular, but the retry makes it solvable; the
    // bias then carries the whole fit
    DesignMatrix m(1);
    m.add_row(std::vector<double>{0.0}, 1.0);
    m.add_row(std::vector<double>{0.0}, 2.0);
    const CoefVector t = solve_ridge(m, 0.0);
    CHECK(t[1] == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("objective_sse equals the half sum of squared residuals") {
    DesignMatrix m(1);
    m.add_row(std::vector<double>{1.0}, 2.0);
    m.add_row(std::vector<double>{2.0}, 1.0);
    m.add_row(std::vector<double>{-1.0}, 0.5);
    m.add_row(std::vector<double>{0.5}, -1.0);
    const CoefVector theta{0.7, -0.2};
    double expect = 0.0;
    for (int i = 0; i < 4; ++i) {
        const double r = m.target(i) - (theta[0] * m.row(i)[0] + theta[1]);
        expect += 0.5 * r * r;
    }
    CHECK(objective_sse(m, theta) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("solve_ridge is invariant to row permutation") {
    const DesignMatrix m = testutil::random_data(40, 3, 99);
    std::vector<int> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    const DesignMatrix shuffled = m.subset(perm);

    const CoefVector a = solve_ridge(m, 0.05);
    const CoefVector b = solve_ridge(shuffled, 0.05);
    CHECK(testutil::max_abs_diff(a, b) <= 1e-12);
}

TEST_CASE("OLS solution is optimal against random probes") {
    const DesignMatrix m = testutil::random_data(60, 4, 123);
    const CoefVector star = solve_ridge(m, 0.0);
    const double best = objective_sse(m, star);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CoefVector probe = testutil::random_theta(m.p(), 1000 + s);
        CHECK(best <= objective_sse(m, probe) + 1e-9);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    const DesignMatrix m = testutil::random_data(5, 2, 3);
    CHECK_THROWS_AS(objective_sse(m, CoefVector{1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(spd_solve(std::vector<double>{1, 0, 0, 1}, std::vector<double>{1.0}, 2),
                    DimensionMismatch);
}
