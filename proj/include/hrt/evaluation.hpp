#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrt/config.hpp"
#include "hrt/datasets.hpp"
#include "hrt/tree.hpp"

namespace hrt::evaluation {

struct RegressionMetrics {
    double rmse = 0.0;
    double mae = 0.0;
    double r2 = 0.0;
};

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> truth);

struct ClassificationMetrics {
    double auc = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

// AUC is rank-based with midrank ties; accuracy/F1 threshold probabilities
// at 0.5 inclusive.
ClassificationMetrics classification_metrics(std::span<const double> prob,
                                             std::span<const int> label);

struct AblationRow {
    std::string step_label;
    double mean_rmse = 0.0;
    double mean_leaves = 0.0;
    double avg_iters = 0.0;
    double fit_seconds = 0.0;
    double avg_fallbacks = 0.0;
    double avg_splits = 0.0;
    double fallback_rate_pct = 0.0;
};

struct DataSource {
    std::optional<datasets::SyntheticSpec> synth;
    std::string csv_path;        // used when synth is empty
    std::string csv_target;
    bool csv_header = true;
};

struct ExperimentSpec {
    DataSource source;
    HrtConfig cfg;
    int repetitions = 10;
    double train_fraction = 0.7;
    int jobs = 1;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;   // sample std; 0 when repetitions == 1
};

struct ExperimentSummary {
    MeanStd rmse;
    MeanStd mae;
    MeanStd r2;
    AblationRow row;
};

// Per repetition: regenerate (synthetic) or resplit (CSV) with a derived
// seed, fit, evaluate on the held-out split, collect FitReport counters.
ExperimentSummary run_experiment(const ExperimentSpec& spec);

// Runs run_experiment once per step label ("auto" or a decimal mu),
// varying only the step policy.
std::vector<AblationRow> ablate(const DataSource& source, const std::vector<std::string>& labels,
                                const HrtConfig& base_cfg, int repetitions,
                                double train_fraction = 0.7, int jobs = 1);

StepPolicy parse_step_label(const std::string& label);

std::string ablation_csv(const std::vector<AblationRow>& rows);
std::string ablation_table(const std::vector<AblationRow>& rows);

} // namespace hrt::evaluation
