#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hrt/config.hpp"
#include "hrt/data.hpp"

namespace hrt {

enum class HingeKind { Max, Min };

// One oblique split: h(x) = max (or min) of two affine scores. The split
// hyperplane is the equality locus x'(theta1 - theta2) = 0.
struct SplitParams {
    CoefVector theta1;
    CoefVector theta2;
    HingeKind kind = HingeKind::Max;
};

struct Partition {
    std::vector<int> s1;
    std::vector<int> s2;
};

struct SplitOutcome {
    SplitParams params;
    bool converged = false;
    bool used_fallback = false;
    int iterations = 0;
    std::vector<double> objective_trace;
    double final_rmse = 0.0;
};

// Data-driven initialization: median split on the largest-range feature,
// per-subset ridge fits, with a perturbed global fit as the degenerate
// fallback and a diversity check on the resulting pair. Returns one
// SplitParams per hinge kind (max first).
std::pair<SplitParams, SplitParams> initialize_params(const DesignMatrix& node, double alpha,
                                                      std::uint64_t seed);

// Max kind: row j in S1 iff x'theta1 >= x'theta2; Min kind uses <=.
// Ties go to S1 for both kinds.
Partition partition(const DesignMatrix& node, const SplitParams& p);

// 1/2 sum (y - h(x, theta))^2 with h per hinge kind.
double objective_v(const DesignMatrix& node, const SplitParams& p);

// Stacked block gradient [-sum_{S1} x(y - x'theta1); -sum_{S2} x(y - x'theta2)]
// over the partition induced by p.
std::vector<double> gradient_v(const DesignMatrix& node, const SplitParams& p);

// (theta_OLS,1 - theta1; theta_OLS,2 - theta2) with per-block ridge fits.
// Equals -H^-1 grad V for alpha = 0.
std::vector<double> newton_direction(const DesignMatrix& node, const SplitParams& p, double alpha);

struct StepResult {
    SplitParams params;
    double accepted_mu = 0.0;
};

// One damped Newton update theta <- theta + mu * (theta_OLS - theta).
// Fixed policy applies mu unconditionally; Auto backtracks until the
// candidate's node RMSE strictly decreases and both sides stay nonempty,
// throwing NoDescent when the trial budget is exhausted.
StepResult newton_step(const DesignMatrix& node, const SplitParams& p, const StepPolicy& policy,
                       double alpha);

// Alternating fit/repartition loop for one hinge kind.
SplitOutcome find_optimal_split(const DesignMatrix& node, HingeKind kind, const HrtConfig& cfg);

// Runs both kinds and keeps the lower-RMSE outcome (ties pick Max).
SplitOutcome select_split(const DesignMatrix& node, const HrtConfig& cfg);

// Axis-aligned median split on a seeded random non-constant feature,
// expressed as a hinge whose score difference is exactly e_k with bias
// -median. Throws Unsplittable when every feature is constant.
SplitParams fallback_split(const DesignMatrix& node, std::uint64_t seed);

} // namespace hrt
