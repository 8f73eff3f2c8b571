#include "hrt/tree.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hrt/kernels.hpp"
#include "hrt/linalg.hpp"
#include "hrt/rng.hpp"

#ifdef HRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace hrt {

namespace {

constexpr int kParallelBuildMinRows = 256;

struct BuildResult {
    std::unique_ptr<TreeNode> node;
    int leaves = 0;
    int depth = 0;
    int splits = 0;
    int fallbacks = 0;
    long iter_sum = 0;
    std::vector<SplitOutcome> traces;
};

CoefVector leaf_fit(const DesignMatrix& node, double alpha) {
    try {
        return solve_ridge(node, alpha);
    } catch (const SingularSystem&) {
        double mean = 0.0;
        for (int i = 0; i < node.n(); ++i) mean += node.target(i);
        CoefVector theta(static_cast<std::size_t>(node.p()), 0.0);
        theta.back() = node.n() > 0 ? mean / node.n() : 0.0;
        return theta;
    }
}

std::unique_ptr<TreeNode> make_leaf(CoefVector theta) {
    auto leaf = std::make_unique<TreeNode>();
    leaf->theta_leaf = std::move(theta);
    return leaf;
}

void merge_child(BuildResult& parent, BuildResult&& child) {
    parent.leaves += child.leaves;
    parent.depth = std::max(parent.depth, child.depth);
    parent.splits += child.splits;
    parent.fallbacks += child.fallbacks;
    parent.iter_sum += child.iter_sum;
    for (auto& t : child.traces) parent.traces.push_back(std::move(t));
}

BuildResult build(const DesignMatrix& data, int depth, std::uint64_t seed, const HrtConfig& cfg,
                  bool parallel) {
    BuildResult res;
    const int n = data.n();

    CoefVector theta_leaf = leaf_fit(data, cfg.ridge_alpha);
    const double leaf_rmse = std::sqrt(kernels::residual_ss(data, {}, theta_leaf) / n);

    if (depth >= cfg.max_depth || n < cfg.min_samples || leaf_rmse < cfg.rmse_threshold) {
        res.node = make_leaf(std::move(theta_leaf));
        res.leaves = 1;
        res.depth = depth;
        return res;
    }

    HrtConfig node_cfg = cfg;
    node_cfg.seed = derive_seed(seed, 0x5917);
    SplitOutcome outcome = select_split(data, node_cfg);
    if (!outcome.converged) {
        try {
            outcome.params = fallback_split(data, derive_seed(seed, 0xfa11));
            outcome.used_fallback = true;
        } catch (const Error&) {
            res.node = make_leaf(std::move(theta_leaf));
            res.leaves = 1;
            res.depth = depth;
            return res;
        }
    }

    // routing is always "x'theta1 >= x'theta2 goes left"; a min-kind winner
    // is stored with its pair swapped so that rule routes its S1 left
    SplitParams stored = outcome.params;
    if (stored.kind == HingeKind::Min) std::swap(stored.theta1, stored.theta2);

    std::vector<std::uint8_t> side;
    kernels::hinge_sides(data, stored.theta1, stored.theta2, /*min_kind=*/false, side);
    std::vector<int> left_idx, right_idx;
    for (int i = 0; i < n; ++i)
        (side[static_cast<std::size_t>(i)] ? left_idx : right_idx).push_back(i);

    if (static_cast<int>(left_idx.size()) < cfg.min_samples ||
        static_cast<int>(right_idx.size()) < cfg.min_samples) {
        res.node = make_leaf(std::move(theta_leaf));
        res.leaves = 1;
        res.depth = depth;
        return res;
    }

    res.splits = 1;
    res.fallbacks = outcome.used_fallback ? 1 : 0;
    res.iter_sum = outcome.iterations;
    res.traces.push_back(outcome);

    const DesignMatrix left_data = data.subset(left_idx);
    const DesignMatrix right_data = data.subset(right_idx);
    const std::uint64_t left_seed = derive_seed(seed, 1);
    const std::uint64_t right_seed = derive_seed(seed, 2);

    BuildResult left_res, right_res;
#ifdef HRT_HAVE_OPENMP
    if (parallel && n >= kParallelBuildMinRows) {
#pragma omp task shared(left_res)
        left_res = build(left_data, depth + 1, left_seed, cfg, parallel);
        right_res = build(right_data, depth + 1, right_seed, cfg, parallel);
#pragma omp taskwait
    } else
#endif
    {
        left_res = build(left_data, depth + 1, left_seed, cfg, false);
        right_res = build(right_data, depth + 1, right_seed, cfg, false);
    }

    auto internal = std::make_unique<TreeNode>();
    internal->split = std::move(stored);
    internal->fallback_used = outcome.used_fallback;
    internal->left = std::move(left_res.node);
    internal->right = std::move(right_res.node);
    res.node = std::move(internal);
    merge_child(res, std::move(left_res));
    merge_child(res, std::move(right_res));
    return res;
}

const TreeNode* route(const TreeNode* node, const double* aug) {
    while (!node->is_leaf()) {
        const double s1 = dot_aug(aug, node->split.theta1);
        const double s2 = dot_aug(aug, node->split.theta2);
        node = s1 >= s2 ? node->left.get() : node->right.get();
    }
    return node;
}

void format_double(std::string& out, double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

void write_coeffs(std::string& out, const CoefVector& theta) {
    for (std::size_t k = 0; k < theta.size(); ++k) {
        if (k) out.push_back(' ');
        format_double(out, theta[k]);
    }
}

void write_node(std::string& out, const TreeNode& node) {
    if (node.is_leaf()) {
        out += "(leaf ";
        write_coeffs(out, node.theta_leaf);
        out.push_back(')');
        return;
    }
    out += "(node kind=";
    out += node.split.kind == HingeKind::Min ? "min" : "max";
    out += " t1=";
    write_coeffs(out, node.split.theta1);
    out += " t2=";
    write_coeffs(out, node.split.theta2);
    out += " fallback=";
    out += node.fallback_used ? '1' : '0';
    out.push_back(' ');
    write_node(out, *node.left);
    out.push_back(' ');
    write_node(out, *node.right);
    out.push_back(')');
}

struct Parser {
    const char* cur;
    const char* end;
    int width;   // d + 1

    void skip_ws() {
        while (cur < end && (*cur == ' ' || *cur == '\n' || *cur == '\t' || *cur == '\r')) ++cur;
    }
    void expect(char c) {
        skip_ws();
        if (cur >= end || *cur != c)
            throw CorruptPayload(std::string("expected '") + c + "' in model payload");
        ++cur;
    }
    bool consume_word(const char* w) {
        skip_ws();
        const std::size_t len = std::strlen(w);
        if (static_cast<std::size_t>(end - cur) >= len && std::memcmp(cur, w, len) == 0) {
            cur += len;
            return true;
        }
        return false;
    }
    double number() {
        skip_ws();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cur, end, v);
        if (ec != std::errc{}) throw CorruptPayload("malformed number in model payload");
        cur = ptr;
        return v;
    }
    CoefVector coeffs() {
        CoefVector theta(static_cast<std::size_t>(width));
        for (int k = 0; k < width; ++k) theta[static_cast<std::size_t>(k)] = number();
        return theta;
    }

    std::unique_ptr<TreeNode> node() {
        expect('(');
        auto out = std::make_unique<TreeNode>();
        if (consume_word("leaf")) {
            out->theta_leaf = coeffs();
        } else if (consume_word("node")) {
            if (!consume_word("kind="))
                throw CorruptPayload("missing kind field");
            if (consume_word("max"))
                out->split.kind = HingeKind::Max;
            else if (consume_word("min"))
                out->split.kind = HingeKind::Min;
            else
                throw CorruptPayload("unknown hinge kind");
            if (!consume_word("t1=")) throw CorruptPayload("missing t1 field");
            out->split.theta1 = coeffs();
            if (!consume_word("t2=")) throw CorruptPayload("missing t2 field");
            out->split.theta2 = coeffs();
            if (!consume_word("fallback=")) throw CorruptPayload("missing fallback field");
            if (consume_word("1"))
                out->fallback_used = true;
            else if (consume_word("0"))
                out->fallback_used = false;
            else
                throw CorruptPayload("bad fallback flag");
            out->left = node();
            out->right = node();
        } else {
            throw CorruptPayload("expected leaf or node");
        }
        expect(')');
        return out;
    }
};

} // namespace

HrtModel fit(const DesignMatrix& train, const HrtConfig& cfg, int jobs) {
    if (train.n() < 1) throw EmptyTrainingSet("fit requires at least one training row");

    const auto t0 = std::chrono::steady_clock::now();
    BuildResult res;
#ifdef HRT_HAVE_OPENMP
    if (jobs > 1) {
        omp_set_num_threads(jobs);
#pragma omp parallel
#pragma omp single
        res = build(train, 0, cfg.seed, cfg, true);
    } else
#endif
    {
        res = build(train, 0, cfg.seed, cfg, false);
    }
    const auto t1 = std::chrono::steady_clock::now();

    HrtModel model;
    model.root = std::move(res.node);
    model.d = train.d();
    model.cfg = cfg;
    model.report.n_leaves = res.leaves;
    model.report.depth = res.depth;
    model.report.n_splits = res.splits;
    model.report.n_fallbacks = res.fallbacks;
    model.report.avg_iterations =
        res.splits > 0 ? static_cast<double>(res.iter_sum) / res.splits : 0.0;
    model.report.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    model.report.per_node_traces = std::move(res.traces);
    return model;
}

double predict(const HrtModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.d)
        throw DimensionMismatch("expected " + std::to_string(model.d) + " features, got " +
                                std::to_string(x.size()));
    std::vector<double> aug(x.begin(), x.end());
    aug.push_back(1.0);
    return dot_aug(aug.data(), route(model.root.get(), aug.data())->theta_leaf);
}

void predict_batch(const HrtModel& model, const DesignMatrix& data, std::vector<double>& out) {
    if (data.d() != model.d)
        throw DimensionMismatch("expected " + std::to_string(model.d) + " features, got " +
                                std::to_string(data.d()));
    const int n = data.n();
    out.assign(static_cast<std::size_t>(n), 0.0);
#ifdef HRT_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (n > 4096)
#endif
    for (int i = 0; i < n; ++i) {
        const double* aug = data.row(i);
        out[static_cast<std::size_t>(i)] = dot_aug(aug, route(model.root.get(), aug)->theta_leaf);
    }
}

ClassPrediction predict_class(const HrtModel& model, std::span<const double> x) {
    const double raw = predict(model, x);
    ClassPrediction cp;
    cp.prob = std::clamp(raw, 0.0, 1.0);
    cp.label = cp.prob >= 0.5 ? 1 : 0;
    return cp;
}

std::string save(const HrtModel& model) {
    std::string out = "HRT v1 d=" + std::to_string(model.d) + " kind=";
    out += model.task == TaskKind::Classification ? "classification" : "regression";
    out.push_back('\n');
    write_node(out, *model.root);
    out.push_back('\n');
    return out;
}

HrtModel load(const std::string& payload) {
    Parser p{payload.data(), payload.data() + payload.size(), 0};
    if (!p.consume_word("HRT")) throw FormatError("not an HRT model file");
    if (!p.consume_word("v1")) throw FormatError("unsupported model version");
    if (!p.consume_word("d=")) throw FormatError("missing feature count");
    const double dval = p.number();
    const int d = static_cast<int>(dval);
    if (d < 1 || dval != d) throw FormatError("bad feature count");
    if (!p.consume_word("kind=")) throw FormatError("missing model kind");

    HrtModel model;
    model.d = d;
    if (p.consume_word("classification"))
        model.task = TaskKind::Classification;
    else if (p.consume_word("regression"))
        model.task = TaskKind::Regression;
    else
        throw FormatError("unknown model kind");

    p.width = d + 1;
    model.root = p.node();
    p.skip_ws();
    if (p.cur != p.end) throw CorruptPayload("trailing data after tree");
    return model;
}

void save_file(const HrtModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    const std::string payload = save(model);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error("failed writing " + path);
}

HrtModel load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load(ss.str());
}

} // namespace hrt
