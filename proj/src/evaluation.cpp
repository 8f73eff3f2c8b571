#include "hrt/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "hrt/rng.hpp"

namespace hrt::evaluation {

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw LengthMismatch("prediction/truth lengths differ: " + std::to_string(pred.size()) +
                             " vs " + std::to_string(truth.size()));
    const std::size_t n = truth.size();
    if (n == 0) throw LengthMismatch("empty metric inputs");

    double sse = 0.0, sae = 0.0, mean = 0.0;
    for (double y : truth) mean += y;
    mean /= static_cast<double>(n);
    double sst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pred[i] - truth[i];
        sse += e * e;
        sae += std::abs(e);
        const double c = truth[i] - mean;
        sst += c * c;
    }
    if (sst == 0.0) throw ZeroVariance("R^2 undefined: target has zero variance");

    RegressionMetrics m;
    m.rmse = std::sqrt(sse / static_cast<double>(n));
    m.mae = sae / static_cast<double>(n);
    m.r2 = 1.0 - sse / sst;
    return m;
}

ClassificationMetrics classification_metrics(std::span<const double> prob,
                                             std::span<const int> label) {
    if (prob.size() != label.size())
        throw LengthMismatch("probability/label lengths differ");
    const std::size_t n = label.size();
    if (n == 0) throw LengthMismatch("empty metric inputs");

    std::size_t n1 = 0;
    for (int l : label) n1 += (l != 0);
    const std::size_t n0 = n - n1;
    if (n0 == 0 || n1 == 0) throw SingleClass("AUC needs both classes present");

    // Mann-Whitney with midranks for tied scores.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return prob[a] < prob[b]; });
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && prob[order[j]] == prob[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);   // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (label[order[k]] != 0) rank_sum_pos += midrank;
        i = j;
    }
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);

    std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const int yhat = prob[k] >= 0.5 ? 1 : 0;
        const int y = label[k] != 0 ? 1 : 0;
        correct += (yhat == y);
        tp += (yhat == 1 && y == 1);
        fp += (yhat == 1 && y == 0);
        fn += (yhat == 0 && y == 1);
    }

    ClassificationMetrics m;
    m.auc = u / (static_cast<double>(n0) * static_cast<double>(n1));
    m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    const double denom = static_cast<double>(2 * tp + fp + fn);
    m.f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    return m;
}

StepPolicy parse_step_label(const std::string& label) {
    if (label == "auto") return StepPolicy::automatic();
    double mu = 0.0;
    auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), mu);
    if (ec != std::errc{} || ptr != label.data() + label.size() || !(mu > 0.0) || mu > 1.0)
        throw Error("step must be 'auto' or a value in (0, 1], got '" + label + "'");
    return StepPolicy::fixed(mu);
}

namespace {

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd r;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) r.mean += x;
    r.mean /= n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            const double c = x - r.mean;
            ss += c * c;
        }
        r.std = std::sqrt(ss / (n - 1.0));
    }
    return r;
}

} // namespace

ExperimentSummary run_experiment(const ExperimentSpec& spec) {
    if (spec.repetitions < 1) throw Error("repetitions must be >= 1");

    DesignMatrix full;
    const bool synthetic = spec.source.synth.has_value();
    if (!synthetic)
        full = datasets::load_csv(spec.source.csv_path, spec.source.csv_target,
                                  spec.source.csv_header);

    std::vector<double> rmses, maes, r2s;
    long total_splits = 0, total_fallbacks = 0;
    double sum_leaves = 0.0, sum_iters = 0.0, sum_secs = 0.0;

    for (int r = 0; r < spec.repetitions; ++r) {
        const std::uint64_t rep_seed = derive_seed(spec.cfg.seed, static_cast<std::uint64_t>(r));

        DesignMatrix train, test;
        if (synthetic) {
            datasets::SyntheticSpec gen = *spec.source.synth;
            gen.seed = derive_seed(gen.seed, static_cast<std::uint64_t>(r));
            const DesignMatrix data = datasets::generate(gen);
            std::tie(train, test) = datasets::split(data, {spec.train_fraction, gen.seed});
        } else {
            std::tie(train, test) = datasets::split(full, {spec.train_fraction, rep_seed});
        }

        HrtConfig cfg = spec.cfg;
        cfg.seed = rep_seed;
        const HrtModel model = fit(train, cfg, spec.jobs);

        std::vector<double> pred;
        predict_batch(model, test, pred);
        const auto m = regression_metrics(pred, test.targets());
        rmses.push_back(m.rmse);
        maes.push_back(m.mae);
        r2s.push_back(m.r2);

        total_splits += model.report.n_splits;
        total_fallbacks += model.report.n_fallbacks;
        sum_leaves += model.report.n_leaves;
        sum_iters += model.report.avg_iterations;
        sum_secs += model.report.fit_seconds;
    }

    const double reps = static_cast<double>(spec.repetitions);
    ExperimentSummary out;
    out.rmse = mean_std(rmses);
    out.mae = mean_std(maes);
    out.r2 = mean_std(r2s);
    out.row.mean_rmse = out.rmse.mean;
    out.row.mean_leaves = sum_leaves / reps;
    out.row.avg_iters = sum_iters / reps;
    out.row.fit_seconds = sum_secs / reps;
    out.row.avg_fallbacks = static_cast<double>(total_fallbacks) / reps;
    out.row.avg_splits = static_cast<double>(total_splits) / reps;
    out.row.fallback_rate_pct =
        total_splits > 0 ? 100.0 * static_cast<double>(total_fallbacks) / static_cast<double>(total_splits)
                         : 0.0;
    return out;
}

std::vector<AblationRow> ablate(const DataSource& source, const std::vector<std::string>& labels,
                                const HrtConfig& base_cfg, int repetitions, double train_fraction,
                                int jobs) {
    std::vector<AblationRow> rows;
    rows.reserve(labels.size());
    for (const auto& label : labels) {
        ExperimentSpec spec;
        spec.source = source;
        spec.cfg = base_cfg;
        spec.cfg.step_policy = parse_step_label(label);
        spec.repetitions = repetitions;
        spec.train_fraction = train_fraction;
        spec.jobs = jobs;
        AblationRow row = run_experiment(spec).row;
        row.step_label = label;
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

void append_exact(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

} // namespace

std::string ablation_csv(const std::vector<AblationRow>& rows) {
    std::string out = "step,mean_rmse,mean_leaves,avg_iters,fit_seconds,avg_fallbacks,avg_splits,"
                      "fallback_rate_pct\n";
    for (const auto& r : rows) {
        out += r.step_label;
        for (double v : {r.mean_rmse, r.mean_leaves, r.avg_iters, r.fit_seconds, r.avg_fallbacks,
                         r.avg_splits, r.fallback_rate_pct}) {
            out.push_back(',');
            append_exact(out, v);
        }
        out.push_back('\n');
    }
    return out;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-8s %12s %12s %10s %12s %12s %10s %10s\n", "step",
                  "mean_rmse", "mean_leaves", "avg_iters", "fit_seconds", "fallbacks", "splits",
                  "fb_rate%");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-8s %12.5f %12.2f %10.2f %12.4f %12.2f %10.2f %10.2f\n",
                      r.step_label.c_str(), r.mean_rmse, r.mean_leaves, r.avg_iters, r.fit_seconds,
                      r.avg_fallbacks, r.avg_splits, r.fallback_rate_pct);
        out += line;
    }
    return out;
}

} // namespace hrt::evaluation
