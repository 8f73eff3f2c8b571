#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hrt/config.hpp"
#include "hrt/split.hpp"

namespace hrt {

struct TreeNode {
    // leaf when both children are null
    CoefVector theta_leaf;
    SplitParams split;
    bool fallback_used = false;
    std::unique_ptr<TreeNode> left;
    std::unique_ptr<TreeNode> right;

    bool is_leaf() const { return !left; }
};

struct FitReport {
    int n_leaves = 0;
    int depth = 0;
    int n_splits = 0;
    int n_fallbacks = 0;
    double avg_iterations = 0.0;
    double fit_seconds = 0.0;
    std::vector<SplitOutcome> per_node_traces;
};

enum class TaskKind { Regression, Classification };

struct HrtModel {
    std::unique_ptr<TreeNode> root;
    int d = 0;
    TaskKind task = TaskKind::Regression;
    HrtConfig cfg;
    FitReport report;
};

// Recursive tree construction. Internal routing is always
// "left iff x'theta1 >= x'theta2"; min-kind winners are stored with their
// coefficient pair swapped so that rule routes their S1 to the left child.
// jobs > 1 builds sibling subtrees concurrently (seeds are derived per
// child, so the result is identical to a serial build).
HrtModel fit(const DesignMatrix& train, const HrtConfig& cfg, int jobs = 1);

double predict(const HrtModel& model, std::span<const double> x);
void predict_batch(const HrtModel& model, const DesignMatrix& data, std::vector<double>& out);

struct ClassPrediction {
    double prob = 0.0;
    int label = 0;
};

// Clips the regression score to [0,1]; label is 1 iff prob >= 0.5.
ClassPrediction predict_class(const HrtModel& model, std::span<const double> x);

// Versioned text format: header "HRT v1 d=<d> kind=..." followed by an
// s-expression tree. Floats round-trip exactly.
std::string save(const HrtModel& model);
HrtModel load(const std::string& payload);

void save_file(const HrtModel& model, const std::string& path);
HrtModel load_file(const std::string& path);

} // namespace hrt
