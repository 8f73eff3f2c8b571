#pragma once

// Shared helpers for the test suites: random dataset builders and a small
// independent dense solver used as an oracle against the library's own
// linear algebra.

#include <cmath>
#include <random>
#include <vector>

#include "hrt/data.hpp"
#include "hrt/split.hpp"

namespace testutil {

inline hrt::DesignMatrix random_data(int n, int d, std::uint64_t seed, double lo = -2.0,
                                     double hi = 2.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo, hi);
    std::normal_distribution<double> uy(0.0, 1.0);
    hrt::DesignMatrix m(d);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (double& v : x) v = ux(rng);
        m.add_row(x, uy(rng));
    }
    return m;
}

inline hrt::CoefVector random_theta(int p, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    hrt::CoefVector t(static_cast<std::size_t>(p));
    for (double& v : t) v = g(rng);
    return t;
}

// Dataset generated exactly by a single hinge y = max/min(x't1, x't2).
inline hrt::DesignMatrix hinge_data(int n, int d, const hrt::CoefVector& t1,
                                    const hrt::CoefVector& t2, bool min_kind, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    hrt::DesignMatrix m(d);
    std::vector<double> x(static_cast<std::size_t>(d) + 1);
    x.back() = 1.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = ux(rng);
        const double s1 = hrt::dot_aug(x.data(), t1);
        const double s2 = hrt::dot_aug(x.data(), t2);
        const double y = min_kind ? std::min(s1, s2) : std::max(s1, s2);
        m.add_row(std::span(x.data(), static_cast<std::size_t>(d)), y);
    }
    return m;
}

// Plain Gaussian elimination with partial pivoting; row-major a is n x n.
// Deliberately independent of the library's Cholesky path.
inline std::vector<double> gauss_solve(std::vector<double> a, std::vector<double> b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * n + col]) >
                std::abs(a[static_cast<std::size_t>(piv) * n + col]))
                piv = r;
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<std::size_t>(col) * n + c],
                          a[static_cast<std::size_t>(piv) * n + c]);
            std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(piv)]);
        }
        const double diag = a[static_cast<std::size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<std::size_t>(r) * n + col] / diag;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r) * n + c] -= f * a[static_cast<std::size_t>(col) * n + c];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            s -= a[static_cast<std::size_t>(r) * n + c] * x[static_cast<std::size_t>(c)];
        x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r) * n + r];
    }
    return x;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testutil
