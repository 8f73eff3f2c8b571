#pragma once

#include <cstdint>

namespace hrt {

// Step-size policy for the damped Newton update. Fixed uses a constant
// mu in (0,1]; Auto backtracks geometrically from mu0 until the node RMSE
// strictly decreases.
struct StepPolicy {
    enum class Mode { Fixed, Auto };
    Mode mode = Mode::Auto;
    double mu = 1.0;            // Fixed
    double mu0 = 1.0;           // Auto
    double beta = 0.5;          // Auto
    int max_backtracks = 20;    // Auto

    static StepPolicy fixed(double mu) {
        StepPolicy p;
        p.mode = Mode::Fixed;
        p.mu = mu;
        return p;
    }
    static StepPolicy automatic(double mu0 = 1.0, double beta = 0.5, int max_backtracks = 20) {
        StepPolicy p;
        p.mode = Mode::Auto;
        p.mu0 = mu0;
        p.beta = beta;
        p.max_backtracks = max_backtracks;
        return p;
    }
};

struct HrtConfig {
    int max_depth = 6;
    int min_samples = 10;
    double rmse_threshold = 0.0;
    double ridge_alpha = 0.0;
    StepPolicy step_policy = StepPolicy::automatic();
    int t_max = 100;
    double epsilon = 1e-6;
    std::uint64_t seed = 0;
};

} // namespace hrt
