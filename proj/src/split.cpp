#include "hrt/split.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "hrt/kernels.hpp"
#include "hrt/linalg.hpp"
#include "hrt/rng.hpp"

namespace hrt {

namespace {

constexpr double kDiversityTol = 1e-8;
constexpr double kPerturbScale = 1e-2;
constexpr double kCornerOffset = 1e-3;

double inf_norm_diff(const CoefVector& a, const CoefVector& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + n / 2, v.end());
    double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + n / 2);
    return 0.5 * (lo + hi);
}

// min-ridge enforcement keeps undersized or collinear blocks solvable
CoefVector fit_block(const DesignMatrix& node, std::span<const int> idx, double alpha) {
    const kernels::Gram g = kernels::gram(node, idx);
    double eff = alpha;
    if (static_cast<int>(idx.size()) < node.p())
        eff = std::max(alpha, 1e-8 * g.trace());
    try {
        return solve_ridge_gram(g, eff);
    } catch (const SingularSystem&) {
        return solve_ridge_gram(g, std::max(eff, 1e-8 * g.trace()));
    }
}

CoefVector perturb(const CoefVector& base, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    CoefVector out(base.size());
    for (std::size_t k = 0; k < base.size(); ++k)
        out[k] = base[k] + kPerturbScale * (1.0 + std::abs(base[k])) * gauss(rng);
    return out;
}

Partition sides_to_partition(const std::vector<std::uint8_t>& side) {
    Partition p;
    for (int i = 0; i < static_cast<int>(side.size()); ++i)
        (side[static_cast<std::size_t>(i)] ? p.s1 : p.s2).push_back(i);
    return p;
}

void check_split_dims(const DesignMatrix& node, const SplitParams& p) {
    check_dims(node, p.theta1);
    check_dims(node, p.theta2);
}

struct Direction {
    std::vector<double> stacked;   // 2p
    Partition part;
    double norm() const {
        return l2_norm(std::span(stacked).first(stacked.size() / 2)) +
               l2_norm(std::span(stacked).subspan(stacked.size() / 2));
    }
};

Direction direction_impl(const DesignMatrix& node, const SplitParams& p, double alpha) {
    check_split_dims(node, p);
    Direction dir;
    dir.part = partition(node, p);
    if (dir.part.s1.empty() || dir.part.s2.empty())
        throw EmptyPartitionSide(dir.part.s1.empty() ? "S1 is empty" : "S2 is empty");

    const int w = node.p();
    dir.stacked.assign(static_cast<std::size_t>(2 * w), 0.0);
    try {
        const CoefVector ols1 = fit_block(node, dir.part.s1, alpha);
        const CoefVector ols2 = fit_block(node, dir.part.s2, alpha);
        for (int k = 0; k < w; ++k) {
            dir.stacked[static_cast<std::size_t>(k)] = ols1[static_cast<std::size_t>(k)] - p.theta1[static_cast<std::size_t>(k)];
            dir.stacked[static_cast<std::size_t>(w + k)] = ols2[static_cast<std::size_t>(k)] - p.theta2[static_cast<std::size_t>(k)];
        }
    } catch (const SingularSystem& e) {
        throw DegenerateBlock(e.what());
    }
    return dir;
}

SplitParams apply_step(const SplitParams& p, const std::vector<double>& stacked, double mu) {
    SplitParams out = p;
    const std::size_t w = p.theta1.size();
    for (std::size_t k = 0; k < w; ++k) {
        out.theta1[k] += mu * stacked[k];
        out.theta2[k] += mu * stacked[w + k];
    }
    return out;
}

StepResult step_with_direction(const DesignMatrix& node, const SplitParams& p,
                               const StepPolicy& policy, const Direction& dir) {
    if (policy.mode == StepPolicy::Mode::Fixed)
        return {apply_step(p, dir.stacked, policy.mu), policy.mu};

    const bool min_kind = p.kind == HingeKind::Min;
    const double v0 = 0.5 * kernels::hinge_ss(node, p.theta1, p.theta2, min_kind);
    std::vector<std::uint8_t> side;
    double mu = policy.mu0;
    for (int t = 0; t < policy.max_backtracks; ++t, mu *= policy.beta) {
        SplitParams cand = apply_step(p, dir.stacked, mu);
        kernels::hinge_sides(node, cand.theta1, cand.theta2, min_kind, side);
        const int n1 = static_cast<int>(std::count(side.begin(), side.end(), std::uint8_t{1}));
        if (n1 == 0 || n1 == static_cast<int>(side.size())) continue;   // invalid split
        const double v = 0.5 * kernels::hinge_ss(node, cand.theta1, cand.theta2, min_kind);
        if (v < v0) return {std::move(cand), mu};
    }
    throw NoDescent("no strictly decreasing valid step within " +
                    std::to_string(policy.max_backtracks) + " backtracks");
}

// A starting pair whose score difference never changes sign over the node is
// as degenerate as an identical pair: the very first partition is one-sided
// and the alternation cannot start. Repair deterministically: re-center the
// score difference at its median so the boundary passes through the data; if
// the scores are (near-)constant, encode the axis-aligned median test on the
// widest feature around the mean of the two fits instead.
void repair_one_sided(const DesignMatrix& node, CoefVector& theta1, CoefVector& theta2) {
    const int n = node.n();
    auto two_sided = [&] {
        int pos = 0, neg = 0;
        for (int i = 0; i < n; ++i) {
            const double s = dot_aug(node.row(i), theta1) - dot_aug(node.row(i), theta2);
            pos += s > 0.0;
            neg += s < 0.0;
        }
        return pos > 0 && neg > 0;
    };
    if (two_sided()) return;

    int best_k = 0;
    double best_range = -1.0;
    for (int k = 0; k < node.d(); ++k) {
        double lo = node.row(0)[k], hi = lo;
        for (int i = 1; i < n; ++i) {
            lo = std::min(lo, node.row(i)[k]);
            hi = std::max(hi, node.row(i)[k]);
        }
        if (hi - lo > best_range) {
            best_range = hi - lo;
            best_k = k;
        }
    }
    if (best_range <= 0.0) return;   // all features constant; nothing to aim at

    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        s[static_cast<std::size_t>(i)] =
            dot_aug(node.row(i), theta1) - dot_aug(node.row(i), theta2);
    theta2.back() += median_of(s);
    if (two_sided()) return;

    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = node.row(i)[best_k];
    double m = median_of(col);
    const double lo = *std::min_element(col.begin(), col.end());
    const double hi = *std::max_element(col.begin(), col.end());
    if (m <= lo || m >= hi) m = 0.5 * (lo + hi);
    CoefVector base(static_cast<std::size_t>(node.p()), 0.0);
    for (int j = 0; j < node.p(); ++j)
        base[static_cast<std::size_t>(j)] =
            0.5 * (theta1[static_cast<std::size_t>(j)] + theta2[static_cast<std::size_t>(j)]);
    theta1 = base;
    theta2 = base;
    theta1[static_cast<std::size_t>(best_k)] += 0.5;
    theta2[static_cast<std::size_t>(best_k)] -= 0.5;
    theta1.back() -= 0.5 * m;
    theta2.back() += 0.5 * m;
}

} // namespace

std::pair<SplitParams, SplitParams> initialize_params(const DesignMatrix& node, double alpha,
                                                      std::uint64_t seed) {
    const int n = node.n();
    if (n < 2) throw TooFewSamples("initialization needs at least 2 samples");
    Rng rng(mix_seed(seed));

    // feature with the largest local range
    int best_k = 0;
    double best_range = -1.0;
    for (int k = 0; k < node.d(); ++k) {
        double lo = node.row(0)[k], hi = lo;
        for (int i = 1; i < n; ++i) {
            lo = std::min(lo, node.row(i)[k]);
            hi = std::max(hi, node.row(i)[k]);
        }
        if (hi - lo > best_range) {
            best_range = hi - lo;
            best_k = k;
        }
    }

    CoefVector theta1, theta2;
    bool degenerate = best_range <= 0.0;
    if (!degenerate) {
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = node.row(i)[best_k];
        const double pivot = median_of(col);
        std::vector<int> lo_idx, hi_idx;
        for (int i = 0; i < n; ++i)
            (node.row(i)[best_k] <= pivot ? lo_idx : hi_idx).push_back(i);
        if (static_cast<int>(lo_idx.size()) >= 2 && static_cast<int>(hi_idx.size()) >= 2) {
            try {
                theta1 = solve_ridge(node, lo_idx, alpha);
                theta2 = solve_ridge(node, hi_idx, alpha);
            } catch (const SingularSystem&) {
                degenerate = true;
            }
        } else {
            degenerate = true;
        }
    }

    if (degenerate) {
        CoefVector global;
        try {
            global = solve_ridge(node, alpha);
        } catch (const SingularSystem&) {
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += node.target(i);
            global.assign(static_cast<std::size_t>(node.p()), 0.0);
            global.back() = mean / n;
        }
        theta1 = perturb(global, rng);
        theta2 = perturb(global, rng);
    }

    for (int attempt = 0; attempt < 3 && inf_norm_diff(theta1, theta2) < kDiversityTol; ++attempt)
        theta2 = perturb(theta2, rng);
    if (inf_norm_diff(theta1, theta2) < kDiversityTol) theta2[0] += kCornerOffset;

    SplitParams max_p{theta1, theta2, HingeKind::Max};
    SplitParams min_p{theta1, theta2, HingeKind::Min};
    return {std::move(max_p), std::move(min_p)};
}

Partition partition(const DesignMatrix& node, const SplitParams& p) {
    check_split_dims(node, p);
    std::vector<std::uint8_t> side;
    kernels::hinge_sides(node, p.theta1, p.theta2, p.kind == HingeKind::Min, side);
    return sides_to_partition(side);
}

double objective_v(const DesignMatrix& node, const SplitParams& p) {
    check_split_dims(node, p);
    return 0.5 * kernels::hinge_ss(node, p.theta1, p.theta2, p.kind == HingeKind::Min);
}

std::vector<double> gradient_v(const DesignMatrix& node, const SplitParams& p) {
    check_split_dims(node, p);
    std::vector<std::uint8_t> side;
    kernels::hinge_sides(node, p.theta1, p.theta2, p.kind == HingeKind::Min, side);
    const int w = node.p();
    std::vector<double> g(static_cast<std::size_t>(2 * w), 0.0);
    for (int i = 0; i < node.n(); ++i) {
        const double* r = node.row(i);
        const bool in_s1 = side[static_cast<std::size_t>(i)] != 0;
        const CoefVector& th = in_s1 ? p.theta1 : p.theta2;
        const double res = node.target(i) - dot_aug(r, th);
        double* blk = g.data() + (in_s1 ? 0 : w);
        for (int k = 0; k < w; ++k) blk[k] -= r[k] * res;
    }
    return g;
}

std::vector<double> newton_direction(const DesignMatrix& node, const SplitParams& p, double alpha) {
    return direction_impl(node, p, alpha).stacked;
}

StepResult newton_step(const DesignMatrix& node, const SplitParams& p, const StepPolicy& policy,
                       double alpha) {
    return step_with_direction(node, p, policy, direction_impl(node, p, alpha));
}

SplitOutcome find_optimal_split(const DesignMatrix& node, HingeKind kind, const HrtConfig& cfg) {
    const int n = node.n();
    if (n < 2) throw TooFewSamples("find_optimal_split needs at least 2 samples");

    auto [max_init, min_init] = initialize_params(node, cfg.ridge_alpha,
                                                  derive_seed(cfg.seed, kind == HingeKind::Min));
    SplitOutcome out;
    out.params = kind == HingeKind::Max ? std::move(max_init) : std::move(min_init);
    repair_one_sided(node, out.params.theta1, out.params.theta2);
    out.objective_trace.push_back(objective_v(node, out.params));

    const bool min_kind = kind == HingeKind::Min;
    const bool fixed = cfg.step_policy.mode == StepPolicy::Mode::Fixed;
    std::vector<std::uint8_t> prev_sides;
    kernels::hinge_sides(node, out.params.theta1, out.params.theta2, min_kind, prev_sides);

    for (int k = 1; k <= cfg.t_max; ++k) {
        Direction dir;
        try {
            dir = direction_impl(node, out.params, cfg.ridge_alpha);
        } catch (const Error&) {
            break;   // empty side or degenerate block at the current iterate
        }
        if (dir.norm() < cfg.epsilon) {
            out.converged = true;
            break;
        }

        StepResult step;
        try {
            step = step_with_direction(node, out.params, cfg.step_policy, dir);
        } catch (const NoDescent&) {
            break;
        }

        std::vector<std::uint8_t> cand_sides;
        kernels::hinge_sides(node, step.params.theta1, step.params.theta2, min_kind, cand_sides);
        const int n1 = static_cast<int>(std::count(cand_sides.begin(), cand_sides.end(), std::uint8_t{1}));
        if (fixed && (n1 == 0 || n1 == n)) break;   // rejected update, one side emptied

        double d1 = 0.0, d2 = 0.0;
        for (std::size_t j = 0; j < step.params.theta1.size(); ++j) {
            const double a = step.params.theta1[j] - out.params.theta1[j];
            const double b = step.params.theta2[j] - out.params.theta2[j];
            d1 += a * a;
            d2 += b * b;
        }
        const double delta = std::sqrt(d1) + std::sqrt(d2);

        out.params = std::move(step.params);
        out.iterations = k;
        const double v = objective_v(node, out.params);
        out.objective_trace.push_back(v);

        if (delta < cfg.epsilon) {
            out.converged = true;
            break;
        }
        if (cand_sides == prev_sides) {
            // Stable partition: jump to the per-block OLS pair, which is the
            // fixed-partition minimizer. Commit only when it improves the
            // objective and the sides it induces are still usable — a full
            // step that collapses one side would turn a workable split into
            // an ineffective one, so the slow iterate keeps its own
            // partition instead.
            try {
                Direction rd = direction_impl(node, out.params, cfg.ridge_alpha);
                SplitParams refreshed = apply_step(out.params, rd.stacked, 1.0);
                std::vector<std::uint8_t> ref_sides;
                kernels::hinge_sides(node, refreshed.theta1, refreshed.theta2, min_kind,
                                     ref_sides);
                const int r1 = static_cast<int>(
                    std::count(ref_sides.begin(), ref_sides.end(), std::uint8_t{1}));
                const double vr = objective_v(node, refreshed);
                if (vr < v && r1 >= cfg.min_samples && n - r1 >= cfg.min_samples) {
                    out.params = std::move(refreshed);
                    out.iterations = k + 1;
                    out.objective_trace.push_back(vr);
                }
            } catch (const Error&) {
            }
            out.converged = true;
            break;
        }
        prev_sides = std::move(cand_sides);
    }

    out.final_rmse = std::sqrt(2.0 * objective_v(node, out.params) / n);
    return out;
}

SplitOutcome select_split(const DesignMatrix& node, const HrtConfig& cfg) {
    SplitOutcome max_out = find_optimal_split(node, HingeKind::Max, cfg);
    SplitOutcome min_out = find_optimal_split(node, HingeKind::Min, cfg);
    return min_out.final_rmse < max_out.final_rmse ? std::move(min_out) : std::move(max_out);
}

SplitParams fallback_split(const DesignMatrix& node, std::uint64_t seed) {
    const int n = node.n();
    if (n < 2) throw TooFewSamples("fallback_split needs at least 2 samples");
    const int d = node.d();

    auto is_constant = [&](int k) {
        const double v0 = node.row(0)[k];
        for (int i = 1; i < n; ++i)
            if (node.row(i)[k] != v0) return false;
        return true;
    };

    Rng rng(mix_seed(seed));
    std::uniform_int_distribution<int> pick(0, d - 1);
    int k = pick(rng);
    if (is_constant(k)) {
        std::vector<int> candidates;
        for (int j = 0; j < d; ++j)
            if (!is_constant(j)) candidates.push_back(j);
        if (candidates.empty()) throw Unsplittable("all features are constant");
        std::uniform_int_distribution<int> redraw(0, static_cast<int>(candidates.size()) - 1);
        k = candidates[static_cast<std::size_t>(redraw(rng))];
    }

    std::vector<double> col(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = node.row(i)[k];
    double m = median_of(col);

    auto count_ge = [&] {
        int c = 0;
        for (double v : col) c += v >= m;
        return c;
    };
    if (count_ge() == n || count_ge() == 0)
        m = 0.5 * (*std::min_element(col.begin(), col.end()) +
                   *std::max_element(col.begin(), col.end()));

    std::vector<int> ge_idx, lt_idx;
    for (int i = 0; i < n; ++i) (col[static_cast<std::size_t>(i)] >= m ? ge_idx : lt_idx).push_back(i);

    const int w = node.p();
    CoefVector mid(static_cast<std::size_t>(w), 0.0);
    if (!ge_idx.empty() && !lt_idx.empty()) {
        try {
            const CoefVector c1 = fit_block(node, ge_idx, 0.0);
            const CoefVector c2 = fit_block(node, lt_idx, 0.0);
            for (int j = 0; j < w; ++j)
                mid[static_cast<std::size_t>(j)] = 0.5 * (c1[static_cast<std::size_t>(j)] + c2[static_cast<std::size_t>(j)]);
        } catch (const SingularSystem&) {
        }
    }

    // score difference is exactly x_k - m, so the split encodes x_k >= m
    SplitParams p;
    p.kind = HingeKind::Max;
    p.theta1 = mid;
    p.theta2 = mid;
    p.theta1[static_cast<std::size_t>(k)] += 0.5;
    p.theta2[static_cast<std::size_t>(k)] -= 0.5;
    p.theta1[static_cast<std::size_t>(w - 1)] -= 0.5 * m;
    p.theta2[static_cast<std::size_t>(w - 1)] += 0.5 * m;
    return p;
}

} // namespace hrt
