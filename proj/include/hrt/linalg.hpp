#pragma once

#include <span>
#include <vector>

#include "hrt/data.hpp"
#include "hrt/kernels.hpp"

namespace hrt {

// Solves A x = b for symmetric positive definite A (p x p, row-major full
// storage) by Cholesky factorization. Throws NotPositiveDefinite when a
// pivot falls below tolerance.
std::vector<double> spd_solve(std::span<const double> a, std::span<const double> b, int p);

// Ridge solution (X'X + alpha*I0)^-1 X'y with the bias coordinate left
// unpenalized. alpha = 0 gives OLS. On a failed factorization one jitter
// retry is made (1e-8 * trace(X'X)/p on all non-bias diagonal entries);
// if that also fails, SingularSystem is thrown.
CoefVector solve_ridge(const DesignMatrix& m, double alpha);
CoefVector solve_ridge(const DesignMatrix& m, std::span<const int> idx, double alpha);

// Same solve operating on pre-accumulated normal equations.
CoefVector solve_ridge_gram(const kernels::Gram& g, double alpha);

// 1/2 sum (y - x'theta)^2 over all rows.
double objective_sse(const DesignMatrix& m, const CoefVector& theta);
double objective_sse(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta);

} // namespace hrt
