#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hrt/linalg.hpp"
#include "hrt/tree.hpp"
#include "util.hpp"

using namespace hrt;

namespace {

DesignMatrix abs_grid(int n = 201) {
    DesignMatrix m(1);
    for (int i = 0; i < n; ++i) {
        const double x = -1.0 + 2.0 * i / (n - 1);
        m.add_row(std::vector<double>{x}, std::abs(x));
    }
    return m;
}

double walk(const TreeNode* node, const std::vector<double>& aug) {
    while (!node->is_leaf()) {
        const double s1 = dot_aug(aug.data(), node->split.theta1);
        const double s2 = dot_aug(aug.data(), node->split.theta2);
        node = s1 >= s2 ? node->left.get() : node->right.get();
    }
    return dot_aug(aug.data(), node->theta_leaf);
}

int count_leaves(const TreeNode* node) {
    if (node->is_leaf()) return 1;
    return count_leaves(node->left.get()) + count_leaves(node->right.get());
}

int tree_depth(const TreeNode* node) {
    if (node->is_leaf()) return 0;
    return 1 + std::max(tree_depth(node->left.get()), tree_depth(node->right.get()));
}

} // namespace

TEST_CASE("max_depth zero yields the global ridge leaf") {
    const DesignMatrix m = testutil::random_data(50, 2, 4);
    HrtConfig cfg;
    cfg.max_depth = 0;
    cfg.ridge_alpha = 0.01;
    const HrtModel model = fit(m, cfg);
    REQUIRE(model.root->is_leaf());
    CHECK(model.report.n_leaves == 1);
    CHECK(model.report.depth == 0);
    CHECK(model.report.n_splits == 0);

    const CoefVector expect = solve_ridge(m, 0.01);
    CHECK(testutil::max_abs_diff(model.root->theta_leaf, expect) <= 1e-12);
    const std::vector<double> x{0.3, -0.7};
    CHECK(predict(model, x) == doctest::Approx(0.3 * expect[0] - 0.7 * expect[1] + expect[2]));
}

TEST_CASE("a depth-1 tree captures |x| to near machine precision") {
    const DesignMatrix m = abs_grid();
    HrtConfig cfg;
    cfg.max_depth = 1;
    cfg.min_samples = 2;
    const HrtModel model = fit(m, cfg);
    CHECK(model.report.n_leaves == 2);
    for (int i = 0; i < m.n(); ++i) {
        const double x = m.row(i)[0];
        CHECK(std::abs(predict(model, std::vector<double>{x}) - std::abs(x)) <= 1e-6);
    }
}

TEST_CASE("predict and predict_batch agree with an independent tree walk") {
    // structured target so the builder actually produces internal nodes
    DesignMatrix train(3);
    {
        const DesignMatrix raw = testutil::random_data(400, 3, 11);
        for (int i = 0; i < raw.n(); ++i) {
            const double* x = raw.row(i);
            train.add_row(std::span(x, 3),
                          std::abs(x[0]) + 0.5 * x[1] * x[2] + 0.05 * raw.target(i));
        }
    }
    HrtConfig cfg;
    cfg.max_depth = 4;
    cfg.min_samples = 5;
    const HrtModel model = fit(train, cfg);
    REQUIRE(model.report.n_splits > 0);

    const DesignMatrix test = testutil::random_data(100, 3, 12);
    std::vector<double> batch;
    predict_batch(model, test, batch);
    for (int i = 0; i < test.n(); ++i) {
        std::vector<double> aug(test.row(i), test.row(i) + 4);
        const double ref = walk(model.root.get(), aug);
        CHECK(predict(model, std::span(test.row(i), 3)) == ref);
        CHECK(batch[static_cast<std::size_t>(i)] == ref);
    }
}

TEST_CASE("leaf and depth accounting matches the built structure") {
    const DesignMatrix m = testutil::random_data(600, 2, 9);
    HrtConfig cfg;
    cfg.max_depth = 5;
    cfg.min_samples = 8;
    const HrtModel model = fit(m, cfg);
    CHECK(model.report.n_leaves == count_leaves(model.root.get()));
    CHECK(model.report.depth == tree_depth(model.root.get()));
    CHECK(model.report.n_splits == model.report.n_leaves - 1);
    CHECK(model.report.depth <= cfg.max_depth);
    CHECK(model.report.n_leaves <= 1 << cfg.max_depth);
    CHECK(static_cast<int>(model.report.per_node_traces.size()) == model.report.n_splits);
}

TEST_CASE("rmse_threshold stops expansion on already-linear data") {
    DesignMatrix m(1);
    for (int i = 0; i < 100; ++i) {
        const double x = 0.02 * i;
        m.add_row(std::vector<double>{x}, 3.0 * x - 1.0);
    }
    HrtConfig cfg;
    cfg.max_depth = 6;
    cfg.rmse_threshold = 1e-6;
    const HrtModel model = fit(m, cfg);
    CHECK(model.report.n_leaves == 1);
}

TEST_CASE("training error decreases with depth") {
    const DesignMatrix m = abs_grid(401);
    auto train_rmse = [&](int depth) {
        HrtConfig cfg;
        cfg.max_depth = depth;
        cfg.min_samples = 4;
        const HrtModel model = fit(m, cfg);
        std::vector<double> pred;
        predict_batch(model, m, pred);
        double ss = 0.0;
        for (int i = 0; i < m.n(); ++i)
            ss += (pred[static_cast<std::size_t>(i)] - m.target(i)) *
                  (pred[static_cast<std::size_t>(i)] - m.target(i));
        return std::sqrt(ss / m.n());
    };
    CHECK(train_rmse(1) <= train_rmse(0));
    CHECK(train_rmse(1) <= 1e-6);
}

TEST_CASE("predict_class clips the regression score") {
    // depth-0 trees on constant targets give exact constant predictors
    auto constant_model = [](double y) {
        DesignMatrix m(1);
        m.add_row(std::vector<double>{0.0}, y);
        m.add_row(std::vector<double>{1.0}, y);
        HrtConfig cfg;
        cfg.max_depth = 0;
        HrtModel model = fit(m, cfg);
        model.task = TaskKind::Classification;
        return model;
    };
    const std::vector<double> x{0.5};

    const ClassPrediction lo = predict_class(constant_model(-0.3), x);
    CHECK(lo.prob == 0.0);
    CHECK(lo.label == 0);

    const ClassPrediction hi = predict_class(constant_model(1.7), x);
    CHECK(hi.prob == 1.0);
    CHECK(hi.label == 1);

    const ClassPrediction mid = predict_class(constant_model(0.5), x);
    CHECK(mid.prob == 0.5);
    CHECK(mid.label == 1);   // threshold is inclusive
}

TEST_CASE("save/load round-trips predictions bitwise") {
    const DesignMatrix train = testutil::random_data(300, 2, 21);
    HrtConfig cfg;
    cfg.max_depth = 4;
    cfg.min_samples = 5;
    const HrtModel model = fit(train, cfg);
    REQUIRE(model.report.n_splits > 0);

    const std::string payload = save(model);
    const HrtModel back = load(payload);
    CHECK(back.d == model.d);
    CHECK(back.task == model.task);
    CHECK(count_leaves(back.root.get()) == model.report.n_leaves);

    const DesignMatrix test = testutil::random_data(200, 2, 22);
    std::vector<double> a, b;
    predict_batch(model, test, a);
    predict_batch(back, test, b);
    CHECK(a == b);

    // a second round trip reproduces the payload byte for byte
    CHECK(save(back) == payload);
}

TEST_CASE("load accepts a hand-written single-leaf model") {
    const HrtModel model = load("HRT v1 d=2 kind=regression\n(leaf 1.5 -2 0.25)\n");
    REQUIRE(model.root->is_leaf());
    CHECK(model.d == 2);
    const std::vector<double> x{2.0, 1.0};
    CHECK(predict(model, x) == doctest::Approx(1.5 * 2.0 - 2.0 * 1.0 + 0.25));
}

TEST_CASE("load rejects bad headers and corrupt payloads") {
    CHECK_THROWS_AS(load("XYZ v1 d=2 kind=regression\n(leaf 0 0 0)\n"), FormatError);
    CHECK_THROWS_AS(load("HRT v2 d=2 kind=regression\n(leaf 0 0 0)\n"), FormatError);
    CHECK_THROWS_AS(load("HRT v1 d=0 kind=regression\n(leaf 0)\n"), FormatError);
    CHECK_THROWS_AS(load("HRT v1 d=1 kind=banana\n(leaf 0 0)\n"), FormatError);
    CHECK_THROWS_AS(load("HRT v1 d=1 kind=regression\n(leaf 0 zzz)\n"), CorruptPayload);
    CHECK_THROWS_AS(load("HRT v1 d=1 kind=regression\n(twig 0 0)\n"), CorruptPayload);
    CHECK_THROWS_AS(load("HRT v1 d=1 kind=regression\n(leaf 0 0\n"), CorruptPayload);
    CHECK_THROWS_AS(load("HRT v1 d=1 kind=regression\n(leaf 0 0) extra\n"), CorruptPayload);
    CHECK_THROWS_AS(
        load("HRT v1 d=1 kind=regression\n(node kind=max t1=1 0 t2=0 0 (leaf 0 0) (leaf 0 0))\n"),
        CorruptPayload);   // missing fallback field
}

TEST_CASE("repeated save/load cycles are stable") {
    const DesignMatrix train = testutil::random_data(250, 2, 33);
    HrtConfig cfg;
    cfg.max_depth = 3;
    cfg.min_samples = 5;
    const HrtModel model = fit(train, cfg);
    std::string payload = save(model);
    for (int i = 0; i < 100; ++i) {
        const HrtModel back = load(payload);
        const std::string next = save(back);
        REQUIRE(next == payload);
        payload = next;
    }
}

TEST_CASE("fits are reproducible and independent of the thread count") {
    const DesignMatrix train = testutil::random_data(1200, 3, 77);
    HrtConfig cfg;
    cfg.max_depth = 5;
    cfg.min_samples = 6;
    cfg.seed = 404;
    const HrtModel a = fit(train, cfg, 1);
    const HrtModel b = fit(train, cfg, 1);
    const HrtModel c = fit(train, cfg, 4);
    CHECK(save(a) == save(b));
    CHECK(save(a) == save(c));
    CHECK(a.report.n_leaves == c.report.n_leaves);
    CHECK(a.report.n_fallbacks == c.report.n_fallbacks);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(fit(DesignMatrix(2), HrtConfig{}), EmptyTrainingSet);

    const DesignMatrix m = testutil::random_data(30, 2, 1);
    HrtConfig cfg;
    cfg.max_depth = 0;
    const HrtModel model = fit(m, cfg);
    CHECK_THROWS_AS(predict(model, std::vector<double>{1.0}), DimensionMismatch);
    std::vector<double> out;
    CHECK_THROWS_AS(predict_batch(model, DesignMatrix(3), out), DimensionMismatch);
}
