// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Wall-clock comparison of the batched OpenMP loss/gradient kernel against
// the serial per-sample reference.
//
//   bench_kernels [batch] [n_M] [n_R] [width] [repeats]

#include "tdt/fml.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

using namespace tdt;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

std::size_t arg(int argc, char** argv, int i, std::size_t fallback) {
    return argc > i ? static_cast<std::size_t>(std::strtoull(argv[i], nullptr, 10)) : fallback;
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t batch = arg(argc, argv, 1, 64);
    const std::size_t n_m = arg(argc, argv, 2, 19);
    const std::size_t n_r = arg(argc, argv, 3, 5);
    const std::size_t width = arg(argc, argv, 4, 64);
    const int repeats = static_cast<int>(arg(argc, argv, 5, 5));
    const std::size_t n_v = 2;

    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Burst> bursts;
    for (std::size_t b = 0; b < batch; ++b) {
        std::vector<double> flat((n_m + 1 + n_r) * n_v);
        for (double& v : flat) v = u(gen);
        bursts.emplace_back(n_v, std::move(flat), ExplicitParams{});
    }
    const auto model = init_model(n_v, 0, n_m, {width, width}, 7);
    const auto view = batch_of(bursts);

    LossGradient ref;
    const double t_ref = best_of(repeats, [&] { ref = reference::loss_and_gradient(model, view, n_r); });
    std::printf("batch %zu, n_M %zu, n_R %zu, widths {%zu,%zu}, %zu parameters, max threads %d\n", batch, n_m, n_r,
                width, width, model.parameters().size(), omp_get_max_threads());
    std::printf("%-28s %10.3f ms\n", "serial reference", 1e3 * t_ref);

    for (int threads = 1; threads <= omp_get_max_threads(); threads *= 2) {
        LossGradient fast;
        const double t = best_of(repeats, [&] {
            fast = loss_and_gradient(model, view, n_r, {.chunk = 16, .workers = threads});
        });
        double diff = 0.0;
        for (std::size_t i = 0; i < fast.gradient.size(); ++i) {
            diff = std::max(diff, std::abs(fast.gradient[i] - ref.gradient[i]));
        }
        std::printf("batched kernel, %2d thread(s) %10.3f ms  speedup %5.2fx  max |dg| %.1e\n", threads, 1e3 * t,
                    t_ref / t, diff);
    }
    return 0;
}
