// Timings for the serial reference kernels vs the OpenMP versions.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <vector>

#include "hrt/kernels.hpp"
#include "hrt/rng.hpp"

using hrt::DesignMatrix;
using Clock = std::chrono::steady_clock;

namespace {

double time_of(int reps, auto&& fn) {
    fn();   // warm-up
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

DesignMatrix make_bench_data(int n, int d, std::uint64_t seed) {
    hrt::Rng rng(hrt::mix_seed(seed));
    std::normal_distribution<double> g(0.0, 1.0);
    DesignMatrix m(d);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (double& v : x) v = g(rng);
        m.add_row(x, g(rng));
    }
    return m;
}

} // namespace

int main() {
    std::printf("threads: %d\n\n", hrt::kernels::max_threads());
    std::printf("%-12s %10s %6s %4s %12s %12s %8s\n", "kernel", "rows", "dim", "reps",
                "serial_s", "parallel_s", "speedup");

    for (int n : {10'000, 100'000, 1'000'000}) {
        for (int d : {2, 8, 32}) {
            const DesignMatrix m = make_bench_data(n, d, 42);
            hrt::CoefVector t1(static_cast<std::size_t>(d) + 1, 0.1);
            hrt::CoefVector t2(static_cast<std::size_t>(d) + 1, -0.1);
            t2.back() = 0.3;
            const int reps = n >= 1'000'000 ? 3 : 10;

            const double gs = time_of(reps, [&] { hrt::kernels::serial::gram(m, {}); });
            const double gp = time_of(reps, [&] { hrt::kernels::parallel::gram(m, {}); });
            std::printf("%-12s %10d %6d %4d %12.6f %12.6f %7.2fx\n", "gram", n, d, reps, gs, gp,
                        gs / gp);

            const double rs =
                time_of(reps, [&] { hrt::kernels::serial::residual_ss(m, {}, t1); });
            const double rp =
                time_of(reps, [&] { hrt::kernels::parallel::residual_ss(m, {}, t1); });
            std::printf("%-12s %10d %6d %4d %12.6f %12.6f %7.2fx\n", "residual_ss", n, d, reps, rs,
                        rp, rs / rp);

            std::vector<std::uint8_t> side;
            const double ss = time_of(
                reps, [&] { hrt::kernels::serial::hinge_sides(m, t1, t2, false, side); });
            const double sp = time_of(
                reps, [&] { hrt::kernels::parallel::hinge_sides(m, t1, t2, false, side); });
            std::printf("%-12s %10d %6d %4d %12.6f %12.6f %7.2fx\n", "hinge_sides", n, d, reps, ss,
                        sp, ss / sp);

            const double hs =
                time_of(reps, [&] { hrt::kernels::serial::hinge_ss(m, t1, t2, false); });
            const double hp =
                time_of(reps, [&] { hrt::kernels::parallel::hinge_ss(m, t1, t2, false); });
            std::printf("%-12s %10d %6d %4d %12.6f %12.6f %7.2fx\n", "hinge_ss", n, d, reps, hs, hp,
                        hs / hp);
        }
    }
    return 0;
}
