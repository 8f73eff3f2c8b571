#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "hrt/data.hpp"

namespace hrt::datasets {

enum class FunctionId { Sinc, TwistedSigmoid, F1, F2, F3, F4 };

FunctionId function_from_name(const std::string& name);
std::string function_name(FunctionId id);
int function_dim(FunctionId id);

// Input box: [-1.5, 1.5] for sinc, [-3, 3] for twisted_sigmoid, [-3, 3]^2
// for f1..f4.
void function_domain(FunctionId id, double* lo, double* hi);

// Noiseless function value. Sinc evaluates to its limit -1 at x = 0.
double eval_function(FunctionId id, const double* x);

struct SyntheticSpec {
    FunctionId fn = FunctionId::Sinc;
    int n_samples = 1000;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

// Uniform inputs over the function domain plus i.i.d. Gaussian noise.
DesignMatrix generate(const SyntheticSpec& spec);

struct SplitSpec {
    double train_fraction = 0.7;
    std::uint64_t seed = 0;
};

std::pair<DesignMatrix, DesignMatrix> split(const DesignMatrix& data, const SplitSpec& spec);

// Comma-separated numeric CSV. target selects the target column by header
// name or zero-based index (name requires header = true).
DesignMatrix load_csv(const std::string& path, const std::string& target, bool header);

void write_csv(const std::string& path, const DesignMatrix& data);

} // namespace hrt::datasets
