#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

#include "hrt/errors.hpp"

namespace hrt {

// Coefficient vector over augmented features: d weights followed by the bias.
using CoefVector = std::vector<double>;

// Row-major N x (d+1) design matrix. Every row is an augmented feature
// vector [x_1, ..., x_d, 1] with the target stored separately.
class DesignMatrix {
  public:
    DesignMatrix() = default;
    explicit DesignMatrix(int d) : d_(d) {}

    int d() const { return d_; }
    int p() const { return d_ + 1; }   // augmented width
    int n() const { return static_cast<int>(targets_.size()); }

    const double* row(int i) const { return rows_.data() + static_cast<std::size_t>(i) * p(); }
    double target(int i) const { return targets_[static_cast<std::size_t>(i)]; }
    std::span<const double> targets() const { return targets_; }
    const std::vector<double>& raw_rows() const { return rows_; }

    void add_row(std::span<const double> x, double y) {
        assert(static_cast<int>(x.size()) == d_);
        rows_.insert(rows_.end(), x.begin(), x.end());
        rows_.push_back(1.0);
        targets_.push_back(y);
    }

    // Rows selected by index, in the given order.
    DesignMatrix subset(std::span<const int> idx) const {
        DesignMatrix out(d_);
        out.rows_.reserve(idx.size() * static_cast<std::size_t>(p()));
        out.targets_.reserve(idx.size());
        for (int i : idx) {
            const double* r = row(i);
            out.rows_.insert(out.rows_.end(), r, r + p());
            out.targets_.push_back(target(i));
        }
        return out;
    }

  private:
    int d_ = 0;
    std::vector<double> rows_;
    std::vector<double> targets_;
};

inline double dot_aug(const double* row, const CoefVector& theta) {
    double s = 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) s += row[k] * theta[k];
    return s;
}

inline void check_dims(const DesignMatrix& m, const CoefVector& theta) {
    if (static_cast<int>(theta.size()) != m.p())
        throw DimensionMismatch("coefficient length " + std::to_string(theta.size()) +
                                " does not match design width " + std::to_string(m.p()));
}

} // namespace hrt
