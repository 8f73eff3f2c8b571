#include "hrt/kernels.hpp"

#include <numeric>

#ifdef HRT_HAVE_OPENMP
#include <omp.h>
#endif

namespace hrt::kernels {

namespace {

// below this many row*width ops the parallel path is not worth spawning
constexpr long kParallelWorkThreshold = 1 << 16;

std::vector<int> all_indices(const DesignMatrix& m) {
    std::vector<int> idx(static_cast<std::size_t>(m.n()));
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

void gram_block(const DesignMatrix& m, const int* idx, int n, double* xtx, double* xty) {
    const int p = m.p();
    for (int j = 0; j < n; ++j) {
        const double* r = m.row(idx[j]);
        const double y = m.target(idx[j]);
        for (int a = 0; a < p; ++a) {
            const double ra = r[a];
            xty[a] += ra * y;
            double* out = xtx + static_cast<std::size_t>(a) * p;
            for (int b = a; b < p; ++b) out[b] += ra * r[b];
        }
    }
}

void mirror_lower(std::vector<double>& xtx, int p) {
    for (int a = 1; a < p; ++a)
        for (int b = 0; b < a; ++b)
            xtx[static_cast<std::size_t>(a) * p + b] = xtx[static_cast<std::size_t>(b) * p + a];
}

bool use_parallel(Exec exec, long work) {
#ifdef HRT_HAVE_OPENMP
    if (exec == Exec::Parallel) return true;
    if (exec == Exec::Auto) return work >= kParallelWorkThreshold && omp_get_max_threads() > 1;
#else
    (void)exec;
    (void)work;
#endif
    return false;
}

} // namespace

int max_threads() {
#ifdef HRT_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef HRT_HAVE_OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

namespace serial {

Gram gram(const DesignMatrix& m, std::span<const int> idx) {
    std::vector<int> all;
    if (idx.empty() && m.n() > 0) {
        all = all_indices(m);
        idx = all;
    }
    const int p = m.p();
    Gram g;
    g.p = p;
    g.xtx.assign(static_cast<std::size_t>(p) * p, 0.0);
    g.xty.assign(static_cast<std::size_t>(p), 0.0);
    gram_block(m, idx.data(), static_cast<int>(idx.size()), g.xtx.data(), g.xty.data());
    mirror_lower(g.xtx, p);
    return g;
}

double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta) {
    std::vector<int> all;
    if (idx.empty() && m.n() > 0) {
        all = all_indices(m);
        idx = all;
    }
    double s = 0.0;
    for (int i : idx) {
        const double r = m.target(i) - dot_aug(m.row(i), theta);
        s += r * r;
    }
    return s;
}

void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side) {
    const int n = m.n();
    side.assign(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const double s1 = dot_aug(m.row(i), theta1);
        const double s2 = dot_aug(m.row(i), theta2);
        side[static_cast<std::size_t>(i)] = min_kind ? (s1 <= s2) : (s1 >= s2);
    }
}

double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind) {
    double s = 0.0;
    for (int i = 0; i < m.n(); ++i) {
        const double s1 = dot_aug(m.row(i), theta1);
        const double s2 = dot_aug(m.row(i), theta2);
        const double h = min_kind ? (s1 <= s2 ? s1 : s2) : (s1 >= s2 ? s1 : s2);
        const double r = m.target(i) - h;
        s += r * r;
    }
    return s;
}

} // namespace serial

namespace parallel {

#ifdef HRT_HAVE_OPENMP

// Per-thread partials are combined in block order so the result is
// deterministic for a fixed thread count.
Gram gram(const DesignMatrix& m, std::span<const int> idx) {
    std::vector<int> all;
    if (idx.empty() && m.n() > 0) {
        all = all_indices(m);
        idx = all;
    }
    const int p = m.p();
    const int n = static_cast<int>(idx.size());
    const int nb = std::min(omp_get_max_threads(), std::max(1, n));
    const std::size_t pp = static_cast<std::size_t>(p) * p;
    std::vector<double> part_xtx(pp * nb, 0.0);
    std::vector<double> part_xty(static_cast<std::size_t>(p) * nb, 0.0);

#pragma omp parallel for schedule(static) num_threads(nb)
    for (int b = 0; b < nb; ++b) {
        const int lo = static_cast<int>(static_cast<long>(n) * b / nb);
        const int hi = static_cast<int>(static_cast<long>(n) * (b + 1) / nb);
        gram_block(m, idx.data() + lo, hi - lo, part_xtx.data() + pp * b,
                   part_xty.data() + static_cast<std::size_t>(p) * b);
    }

    Gram g;
    g.p = p;
    g.xtx.assign(pp, 0.0);
    g.xty.assign(static_cast<std::size_t>(p), 0.0);
    for (int b = 0; b < nb; ++b) {
        for (std::size_t k = 0; k < pp; ++k) g.xtx[k] += part_xtx[pp * b + k];
        for (int k = 0; k < p; ++k) g.xty[static_cast<std::size_t>(k)] += part_xty[static_cast<std::size_t>(p) * b + k];
    }
    mirror_lower(g.xtx, p);
    return g;
}

double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta) {
    std::vector<int> all;
    if (idx.empty() && m.n() > 0) {
        all = all_indices(m);
        idx = all;
    }
    const int n = static_cast<int>(idx.size());
    const int nb = std::min(omp_get_max_threads(), std::max(1, n));
    std::vector<double> part(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(nb)
    for (int b = 0; b < nb; ++b) {
        const int lo = static_cast<int>(static_cast<long>(n) * b / nb);
        const int hi = static_cast<int>(static_cast<long>(n) * (b + 1) / nb);
        double s = 0.0;
        for (int j = lo; j < hi; ++j) {
            const double r = m.target(idx[j]) - dot_aug(m.row(idx[j]), theta);
            s += r * r;
        }
        part[static_cast<std::size_t>(b)] = s;
    }
    double s = 0.0;
    for (double v : part) s += v;
    return s;
}

void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side) {
    const int n = m.n();
    side.assign(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double s1 = dot_aug(m.row(i), theta1);
        const double s2 = dot_aug(m.row(i), theta2);
        side[static_cast<std::size_t>(i)] = min_kind ? (s1 <= s2) : (s1 >= s2);
    }
}

double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind) {
    const int n = m.n();
    const int nb = std::min(omp_get_max_threads(), std::max(1, n));
    std::vector<double> part(static_cast<std::size_t>(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(nb)
    for (int b = 0; b < nb; ++b) {
        const int lo = static_cast<int>(static_cast<long>(n) * b / nb);
        const int hi = static_cast<int>(static_cast<long>(n) * (b + 1) / nb);
        double s = 0.0;
        for (int i = lo; i < hi; ++i) {
            const double s1 = dot_aug(m.row(i), theta1);
            const double s2 = dot_aug(m.row(i), theta2);
            const double h = min_kind ? (s1 <= s2 ? s1 : s2) : (s1 >= s2 ? s1 : s2);
            const double r = m.target(i) - h;
            s += r * r;
        }
        part[static_cast<std::size_t>(b)] = s;
    }
    double s = 0.0;
    for (double v : part) s += v;
    return s;
}

#else

Gram gram(const DesignMatrix& m, std::span<const int> idx) { return serial::gram(m, idx); }
double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta) {
    return serial::residual_ss(m, idx, theta);
}
void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side) {
    serial::hinge_sides(m, theta1, theta2, min_kind, side);
}
double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind) {
    return serial::hinge_ss(m, theta1, theta2, min_kind);
}

#endif

} // namespace parallel

Gram gram(const DesignMatrix& m, std::span<const int> idx, Exec exec) {
    const long n = idx.empty() ? m.n() : static_cast<long>(idx.size());
    const long work = n * m.p() * m.p();
    return use_parallel(exec, work) ? parallel::gram(m, idx) : serial::gram(m, idx);
}

double residual_ss(const DesignMatrix& m, std::span<const int> idx, const CoefVector& theta,
                   Exec exec) {
    const long n = idx.empty() ? m.n() : static_cast<long>(idx.size());
    return use_parallel(exec, n * m.p()) ? parallel::residual_ss(m, idx, theta)
                                         : serial::residual_ss(m, idx, theta);
}

void hinge_sides(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                 bool min_kind, std::vector<std::uint8_t>& side, Exec exec) {
    if (use_parallel(exec, static_cast<long>(m.n()) * m.p()))
        parallel::hinge_sides(m, theta1, theta2, min_kind, side);
    else
        serial::hinge_sides(m, theta1, theta2, min_kind, side);
}

double hinge_ss(const DesignMatrix& m, const CoefVector& theta1, const CoefVector& theta2,
                bool min_kind, Exec exec) {
    return use_parallel(exec, static_cast<long>(m.n()) * m.p())
               ? parallel::hinge_ss(m, theta1, theta2, min_kind)
               : serial::hinge_ss(m, theta1, theta2, min_kind);
}

} // namespace hrt::kernels
