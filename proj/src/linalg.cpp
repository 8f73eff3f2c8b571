#include "hrt/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hrt {

std::vector<double> spd_solve(std::span<const double> a, std::span<const double> b, int p) {
    if (static_cast<int>(a.size()) != p * p || static_cast<int>(b.size()) != p)
        throw DimensionMismatch("spd_solve: bad operand sizes");

    // lower-triangular Cholesky factor, in place on a copy
    std::vector<double> l(a.begin(), a.end());
    double max_diag = 0.0;
    for (int k = 0; k < p; ++k)
        max_diag = std::max(max_diag, std::abs(a[static_cast<std::size_t>(k) * p + k]));
    const double tol = 1e-13 * std::max(max_diag, 1.0);

    for (int j = 0; j < p; ++j) {
        double d = l[static_cast<std::size_t>(j) * p + j];
        for (int k = 0; k < j; ++k) {
            const double v = l[static_cast<std::size_t>(j) * p + k];
            d -= v * v;
        }
        if (!(d > tol)) throw NotPositiveDefinite("pivot " + std::to_string(d) + " at column " + std::to_string(j));
        const double lj = std::sqrt(d);
        l[static_cast<std::size_t>(j) * p + j] = lj;
        for (int i = j + 1; i < p; ++i) {
            double s = l[static_cast<std::size_t>(i) * p + j];
            for (int k = 0; k < j; ++k)
                s -= l[static_cast<std::size_t>(i) * p + k] * l[static_cast<std::size_t>(j) * p + k];
            l[static_cast<std::size_t>(i) * p + j] = s / lj;
        }
    }

    // L z = b, then L^T x = z
    std::vector<double> x(b.begin(), b.end());
    for (int i = 0; i < p; ++i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) s -= l[static_cast<std::size_t>(i) * p + k] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * p + i];
    }
    for (int i = p - 1; i >= 0; --i) {
        double s = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < p; ++k) s -= l[static_cast<std::size_t>(k) * p + i] * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / l[static_cast<std::size_t>(i) * p + i];
    }
    return x;
}

CoefVector solve_ridge_gram(const kernels::Gram& g, double alpha) {
    const int p = g.p;
    std::vector<double> a = g.xtx;
    for (int k = 0; k < p - 1; ++k) a[static_cast<std::size_t>(k) * p + k] += alpha;   // bias unpenalized
    try {
        return spd_solve(a, g.xty, p);
    } catch (const NotPositiveDefinite&) {
        const double jit = 1e-8 * g.trace() / p;
        for (int k = 0; k < p - 1; ++k) a[static_cast<std::size_t>(k) * p + k] += jit;
        try {
            return spd_solve(a, g.xty, p);
        } catch (const NotPositiveDefinite&) {
            throw SingularSystem("regularized normal matrix is not positive definite");
        }
    }
}

CoefVector solve_ridge(const DesignMatrix& m, double alpha) {
    return solve_ridge(m, {}, alpha);
}

CoefVector solve_ridge(const DesignMatrix& m, std::span<const int> idx, double alpha) {
    const int n = idx.empty() ? m.n() : static_cast<int>(idx.size());
    if (n < 1) throw TooFewSamples("solve_ridge needs at least one row");
    return solve_ridge_gram(kernels::gram(m, idx), alpha);
}

double objective_sse(const DesignMatrix& m, const CoefVector& theta) {
    check_dims(m, theta);
    return 0.5 * kernels::residual_ss(m, {}, theta);
}

double objective_sse(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta) {
    check_dims(m, theta);
    return 0.5 * kernels::residual_ss(m, idx, theta);
}

} // namespace hrt
