// hrt: train, evaluate, and ablate hinge regression trees from the shell.
//
// Exit codes: 0 success, 2 flag/usage error, 3 data error, 4 numeric/fit error.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrt/datasets.hpp"
#include "hrt/evaluation.hpp"
#include "hrt/tree.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
    std::string synth_fn;
    std::string csv_path;
    std::string target = "y";
    bool no_header = false;
    int n_samples = 1000;
    double noise = 0.0;

    int max_depth = 6;
    int min_samples = 10;
    double rmse_threshold = 0.0;
    double ridge = 0.0;
    std::string step = "auto";
    int t_max = 100;
    double epsilon = 1e-6;
    std::uint64_t seed = 0;
    int jobs = 1;
};

void add_data_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--synth", f.synth_fn,
                    "synthetic function: sinc, twisted_sigmoid, f1, f2, f3, f4");
    cmd->add_option("--csv", f.csv_path, "input CSV path");
    cmd->add_option("--target", f.target, "target column name or zero-based index");
    cmd->add_flag("--no-header", f.no_header, "CSV has no header row");
    cmd->add_option("--n", f.n_samples, "synthetic sample count")->check(CLI::PositiveNumber);
    cmd->add_option("--noise", f.noise, "synthetic Gaussian noise sigma")
        ->check(CLI::NonNegativeNumber);
}

void add_fit_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--max-depth", f.max_depth)->check(CLI::NonNegativeNumber);
    cmd->add_option("--min-samples", f.min_samples)->check(CLI::PositiveNumber);
    cmd->add_option("--rmse-threshold", f.rmse_threshold)->check(CLI::NonNegativeNumber);
    cmd->add_option("--ridge", f.ridge)->check(CLI::NonNegativeNumber);
    cmd->add_option("--step", f.step, "'auto' or a fixed step in (0,1]");
    cmd->add_option("--t-max", f.t_max)->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", f.epsilon)->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", f.jobs)->check(CLI::PositiveNumber);
}

hrt::HrtConfig make_config(const CommonFlags& f) {
    hrt::HrtConfig cfg;
    cfg.max_depth = f.max_depth;
    cfg.min_samples = f.min_samples;
    cfg.rmse_threshold = f.rmse_threshold;
    cfg.ridge_alpha = f.ridge;
    cfg.step_policy = hrt::evaluation::parse_step_label(f.step);
    cfg.t_max = f.t_max;
    cfg.epsilon = f.epsilon;
    cfg.seed = f.seed;
    return cfg;
}

hrt::DesignMatrix load_data(const CommonFlags& f) {
    if (!f.synth_fn.empty()) {
        hrt::datasets::SyntheticSpec spec;
        spec.fn = hrt::datasets::function_from_name(f.synth_fn);
        spec.n_samples = f.n_samples;
        spec.noise_sigma = f.noise;
        spec.seed = f.seed;
        return hrt::datasets::generate(spec);
    }
    return hrt::datasets::load_csv(f.csv_path, f.target, !f.no_header);
}

int require_one_source(const CommonFlags& f) {
    if (f.synth_fn.empty() == f.csv_path.empty()) {
        std::cerr << "exactly one of --synth or --csv is required\n";
        return kExitUsage;
    }
    return 0;
}

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void print_report(const CommonFlags& f, const hrt::HrtModel& model) {
    const auto& r = model.report;
    std::cout << "max_depth=" << f.max_depth << '\n'
              << "min_samples=" << f.min_samples << '\n'
              << "rmse_threshold=" << fmt(f.rmse_threshold) << '\n'
              << "ridge_alpha=" << fmt(f.ridge) << '\n'
              << "step=" << f.step << '\n'
              << "t_max=" << f.t_max << '\n'
              << "epsilon=" << fmt(f.epsilon) << '\n'
              << "seed=" << f.seed << '\n'
              << "leaves=" << r.n_leaves << '\n'
              << "depth=" << r.depth << '\n'
              << "splits=" << r.n_splits << '\n'
              << "fallbacks=" << r.n_fallbacks << '\n'
              << "avg_iterations=" << fmt(r.avg_iterations) << '\n'
              << "fit_seconds=" << fmt(r.fit_seconds) << '\n';
}

// Raw numeric CSV reader for prediction inputs. Accepts either d feature
// columns, or d+1 columns with the target dropped (by name with a header,
// otherwise the last column).
std::vector<std::vector<double>> load_features(const std::string& path, const std::string& target,
                                               bool header, int d) {
    std::ifstream in(path);
    if (!in) throw hrt::Error("cannot open " + path);

    std::string line;
    std::vector<std::string> names;
    if (header) {
        if (!std::getline(in, line)) throw hrt::Error("empty CSV file: " + path);
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            names.push_back(cell);
        }
    }

    std::vector<std::vector<double>> rows;
    std::size_t width = 0, drop = static_cast<std::size_t>(-1);
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++row_no;
        std::vector<double> cells;
        std::size_t start = 0;
        std::size_t col = 0;
        while (true) {
            std::size_t pos = line.find(',', start);
            std::string cell = line.substr(start, pos == std::string::npos ? pos : pos - start);
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw hrt::ParseError(row_no, col + 1, "not a number: '" + cell + "'");
            cells.push_back(v);
            ++col;
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (width == 0) {
            width = cells.size();
            if (static_cast<int>(width) == d + 1) {
                drop = width - 1;
                for (std::size_t c = 0; c < names.size(); ++c)
                    if (names[c] == target) drop = c;
            } else if (static_cast<int>(width) != d) {
                throw hrt::DimensionMismatch("model expects " + std::to_string(d) +
                                             " features, CSV has " + std::to_string(width) +
                                             " columns");
            }
        }
        if (cells.size() != width)
            throw hrt::RaggedRows("row " + std::to_string(row_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(width));
        if (drop != static_cast<std::size_t>(-1)) cells.erase(cells.begin() + static_cast<long>(drop));
        rows.push_back(std::move(cells));
    }
    return rows;
}

int run_train(const CommonFlags& f, const std::string& out_path, bool classify) {
    if (int rc = require_one_source(f)) return rc;

    hrt::DesignMatrix data;
    try {
        data = load_data(f);
    } catch (const hrt::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }

    try {
        hrt::HrtModel model = hrt::fit(data, make_config(f), f.jobs);
        if (classify) model.task = hrt::TaskKind::Classification;
        hrt::save_file(model, out_path);
        print_report(f, model);
    } catch (const hrt::Error& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}

int run_predict(const CommonFlags& f, const std::string& model_path, const std::string& out_path,
                bool classify) {
    hrt::HrtModel model;
    std::vector<std::vector<double>> rows;
    try {
        model = hrt::load_file(model_path);
        rows = load_features(f.csv_path, f.target, !f.no_header, model.d);
    } catch (const hrt::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }

    std::string out;
    try {
        for (const auto& x : rows) {
            if (classify || model.task == hrt::TaskKind::Classification) {
                const auto c = hrt::predict_class(model, x);
                out += fmt(c.prob) + "," + std::to_string(c.label) + "\n";
            } else {
                out += fmt(hrt::predict(model, x)) + "\n";
            }
        }
    } catch (const hrt::Error& e) {
        std::cerr << "predict error: " << e.what() << '\n';
        return kExitNumeric;
    }

    if (out_path.empty()) {
        std::cout << out;
    } else {
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "data error: cannot open " << out_path << " for writing\n";
            return kExitData;
        }
        file << out;
    }
    return 0;
}

int run_eval(const CommonFlags& f, const std::string& model_path, bool classify) {
    if (int rc = require_one_source(f)) return rc;

    hrt::HrtModel model;
    hrt::DesignMatrix data;
    try {
        model = hrt::load_file(model_path);
        data = load_data(f);
        if (data.d() != model.d)
            throw hrt::DimensionMismatch("model expects " + std::to_string(model.d) +
                                         " features, data has " + std::to_string(data.d()));
    } catch (const hrt::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }

    try {
        std::vector<double> pred;
        hrt::predict_batch(model, data, pred);
        if (classify || model.task == hrt::TaskKind::Classification) {
            std::vector<double> prob(pred.size());
            std::vector<int> label(pred.size());
            for (std::size_t i = 0; i < pred.size(); ++i) {
                prob[i] = std::min(1.0, std::max(0.0, pred[i]));
                label[i] = data.target(static_cast<int>(i)) >= 0.5 ? 1 : 0;
            }
            const auto m = hrt::evaluation::classification_metrics(prob, label);
            std::cout << "auc=" << fmt(m.auc) << '\n'
                      << "accuracy=" << fmt(m.accuracy) << '\n'
                      << "f1=" << fmt(m.f1) << '\n';
        } else {
            const auto m = hrt::evaluation::regression_metrics(pred, data.targets());
            std::cout << "rmse=" << fmt(m.rmse) << '\n'
                      << "mae=" << fmt(m.mae) << '\n'
                      << "r2=" << fmt(m.r2) << '\n';
        }
    } catch (const hrt::Error& e) {
        std::cerr << "eval error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}

int run_synth(const std::string& fn, int n, double noise, std::uint64_t seed,
              const std::string& out_path) {
    try {
        hrt::datasets::SyntheticSpec spec;
        spec.fn = hrt::datasets::function_from_name(fn);
        spec.n_samples = n;
        spec.noise_sigma = noise;
        spec.seed = seed;
        const hrt::DesignMatrix data = hrt::datasets::generate(spec);
        if (!out_path.empty()) {
            hrt::datasets::write_csv(out_path, data);
        } else {
            std::string buf;
            for (int k = 0; k < data.d(); ++k) buf += "x" + std::to_string(k + 1) + ",";
            buf += "y\n";
            for (int i = 0; i < data.n(); ++i) {
                for (int k = 0; k < data.d(); ++k) buf += fmt(data.row(i)[k]) + ",";
                buf += fmt(data.target(i)) + "\n";
            }
            std::cout << buf;
        }
    } catch (const hrt::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}

int run_ablate(const CommonFlags& f, const std::string& steps, int reps, double train_frac,
               const std::string& out_path) {
    if (int rc = require_one_source(f)) return rc;

    std::vector<std::string> labels;
    std::stringstream ss(steps);
    std::string label;
    while (std::getline(ss, label, ',')) labels.push_back(label);
    if (labels.empty()) {
        std::cerr << "--steps needs at least one label\n";
        return kExitUsage;
    }
    try {
        for (const auto& l : labels) hrt::evaluation::parse_step_label(l);
    } catch (const hrt::Error& e) {
        std::cerr << e.what() << '\n';
        return kExitUsage;
    }

    hrt::evaluation::DataSource source;
    try {
        if (!f.synth_fn.empty()) {
            hrt::datasets::SyntheticSpec spec;
            spec.fn = hrt::datasets::function_from_name(f.synth_fn);
            spec.n_samples = f.n_samples;
            spec.noise_sigma = f.noise;
            spec.seed = f.seed;
            source.synth = spec;
        } else {
            source.csv_path = f.csv_path;
            source.csv_target = f.target;
            source.csv_header = !f.no_header;
        }
    } catch (const hrt::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    }

    try {
        hrt::HrtConfig cfg = make_config(f);
        const auto rows =
            hrt::evaluation::ablate(source, labels, cfg, reps, train_frac, f.jobs);
        const std::string csv = hrt::evaluation::ablation_csv(rows);
        if (!out_path.empty()) {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) {
                std::cerr << "data error: cannot open " << out_path << " for writing\n";
                return kExitData;
            }
            file << csv;
        } else {
            std::cout << csv << '\n';
        }
        std::cout << hrt::evaluation::ablation_table(rows);
    } catch (const hrt::Error& e) {
        std::cerr << "run error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hinge regression trees"};
    app.require_subcommand(1);

    CommonFlags f;
    std::string out_path, model_path, fn, steps = "auto";
    bool classify = false;
    int reps = 10;
    double train_frac = 0.7;

    auto* train = app.add_subcommand("train", "fit a model and write it to --out");
    add_data_flags(train, f);
    add_fit_flags(train, f);
    train->add_option("--seed", f.seed);
    train->add_option("--out", out_path, "model output path")->required();
    train->add_flag("--classify", classify, "mark the model as a classifier");

    auto* predict = app.add_subcommand("predict", "predict rows of a CSV with a saved model");
    predict->add_option("--model", model_path)->required();
    predict->add_option("--csv", f.csv_path)->required();
    predict->add_option("--target", f.target);
    predict->add_flag("--no-header", f.no_header);
    predict->add_option("--out", out_path, "write predictions here instead of standard output");
    predict->add_flag("--classify", classify, "emit prob,label pairs");

    auto* eval = app.add_subcommand("eval", "evaluate a saved model on labeled data");
    eval->add_option("--model", model_path)->required();
    add_data_flags(eval, f);
    eval->add_option("--seed", f.seed);
    eval->add_flag("--classify", classify, "report AUC/accuracy/F1 instead");

    auto* synth = app.add_subcommand("synth", "emit a synthetic benchmark CSV");
    synth->add_option("--fn", fn, "function name")->required();
    synth->add_option("--n", f.n_samples)->check(CLI::PositiveNumber);
    synth->add_option("--noise", f.noise)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", f.seed);
    synth->add_option("--out", out_path, "CSV output path (default: standard output)");

    auto* ablate = app.add_subcommand("ablate", "step-size ablation table over repeated fits");
    add_data_flags(ablate, f);
    add_fit_flags(ablate, f);
    ablate->add_option("--seed", f.seed);
    ablate->add_option("--steps", steps, "comma-separated step labels ('auto' or decimals)");
    ablate->add_option("--reps", reps)->check(CLI::PositiveNumber);
    ablate->add_option("--train-frac", train_frac)->check(CLI::Range(0.0, 1.0));
    ablate->add_option("--out", out_path, "write the CSV here; the table still prints");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    if (train->parsed() || ablate->parsed()) {
        try {
            hrt::evaluation::parse_step_label(f.step);
        } catch (const hrt::Error& e) {
            std::cerr << e.what() << '\n';
            return kExitUsage;
        }
    }

    if (train->parsed()) return run_train(f, out_path, classify);
    if (predict->parsed()) return run_predict(f, model_path, out_path, classify);
    if (eval->parsed()) return run_eval(f, model_path, classify);
    if (synth->parsed()) return run_synth(fn, f.n_samples, f.noise, f.seed, out_path);
    if (ablate->parsed()) return run_ablate(f, steps, reps, train_frac, out_path);
    return kExitUsage;
}
