#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hrt/data.hpp"

namespace hrt::kernels {

enum class Exec { Serial, Parallel, Auto };

// Accumulated normal equations for a row subset: xtx is p*p (full symmetric),
// xty is p. idx may be empty-span meaning "all rows".
struct Gram {
    std::vector<double> xtx;
    std::vector<double> xty;
    int p = 0;
    double trace() const {
        double t = 0.0;
        for (int k = 0; k < p; ++k) t += xtx[static_cast<std::size_t>(k) * p + k];
        return t;
    }
};

Gram gram(const DesignMatrix& m, std::span<const int> idx, Exec exec = Exec::Auto);

// Sum of squared residuals over a row subset (no 1/2 factor).
double residual_ss(const DesignMatrix& m, std::span<const int> idx,
                   const CoefVector& theta, Exec exec = Exec::Auto);

// side[j] = 1 if row j belongs to S1 under the hinge test. For the max
// variant S1 is {x'theta1 >= x'theta2}; for min it is {x'theta1 <= x'theta2}.
// Ties always land in S1.
void hinge_sides(const DesignMatrix& m, const CoefVector& theta1,
                 const CoefVector& theta2, bool min_kind,
                 std::vector<std::uint8_t>& side, Exec exec = Exec::Auto);

// Hinge objective 2V = sum (y - h(x))^2 over all rows.
double hinge_ss(const DesignMatrix& m, const CoefVector& theta1,
                const CoefVector& theta2, bool min_kind, Exec exec = Exec::Auto);

// Serial reference implementations, kept for testing the parallel kernels
// and for the kernel benchmark.
namespace serial {
Gram gram(const DesignMatrix& m, std::span<const int> idx);
double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta);
void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side);
double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind);
} // namespace serial

namespace parallel {
Gram gram(const DesignMatrix& m, std::span<const int> idx);
double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta);
void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side);
double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind);
} // namespace parallel

int max_threads();
void set_threads(int n);

} // namespace hrt::kernels
