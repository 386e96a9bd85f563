// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"
#include "tdt/error.hpp"
#include "tdt/predict.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

using namespace tdt;

namespace {

constexpr double pi = std::numbers::pi;

FourierSeries random_series(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = u(gen);
    for (auto& v : b) v = u(gen);
    return FourierSeries(u(gen), a, b);
}

std::vector<double> equispaced(std::size_t m) {
    std::vector<double> th(m);
    for (std::size_t i = 0; i < m; ++i) th[i] = 2.0 * pi * static_cast<double>(i) / static_cast<double>(m);
    return th;
}

std::vector<QoiVector> rows(std::initializer_list<std::initializer_list<double>> xs) {
    std::vector<QoiVector> out;
    for (auto r : xs) out.emplace_back(std::vector<double>(r));
    return out;
}

} // namespace

TEST_CASE("fourier_eval basics") {
    const FourierSeries c(2.0, std::vector<double>(3, 0.0), std::vector<double>(3, 0.0));
    for (double th : {-3.0, 0.0, 1.0, 10.0}) CHECK(fourier_eval(c, th) == 2.0);
    const FourierSeries cos1(0.0, {1.0}, {0.0});
    CHECK(fourier_eval(cos1, 0.0) == 1.0);
    CHECK(fourier_eval(cos1, pi) == doctest::Approx(-1.0).epsilon(1e-15));
    std::mt19937_64 gen(1);
    const auto s = random_series(gen, 30);
    for (double th : {0.1, 1.7, -2.2, 5.5}) CHECK(std::abs(fourier_eval(s, th) - fourier_eval(s, th + 2 * pi)) < 1e-12);
}

TEST_CASE("fourier_fit of exact low-order signals") {
    const auto th = equispaced(128);
    std::vector<double> v1, v2;
    for (double t : th) {
        v1.push_back(1.0 + std::cos(t));
        v2.push_back(std::sin(2.0 * t));
    }
    const auto f1 = fourier_fit(th, v1, 30);
    CHECK(std::abs(f1.a0() - 1.0) < 1e-10);
    CHECK(std::abs(f1.a()[0] - 1.0) < 1e-10);
    for (std::size_t n = 1; n < 30; ++n) CHECK(std::abs(f1.a()[n]) < 1e-10);
    for (double b : f1.b()) CHECK(std::abs(b) < 1e-10);
    const auto f2 = fourier_fit(th, v2, 30);
    CHECK(std::abs(f2.b()[1] - 1.0) < 1e-10);
    CHECK(std::abs(f2.a0()) < 1e-10);
}

TEST_CASE("fourier round trip of random series") {
    std::mt19937_64 gen(30);
    const auto th = equispaced(128);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_series(gen, 30);
        std::vector<double> v;
        for (double t : th) v.push_back(fourier_eval(s, t));
        const auto p = fourier_fit(th, v, 30).packed(), q = s.packed();
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) < 1e-10);
    }
}

TEST_CASE("fourier_fit rejects rank deficiency") {
    const auto th = equispaced(40);
    CHECK_THROWS_AS(fourier_fit(th, std::vector<double>(40, 1.0), 30), DataError);
    const std::vector<double> repeated(80, 0.5);
    CHECK_THROWS_AS(fourier_fit(repeated, std::vector<double>(80, 1.0), 5), DataError);
}

TEST_CASE("dft matches the direct sum for odd and power-of-two lengths") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> nd;
    for (std::size_t n : {5u, 16u, 27u, 64u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {nd(gen), nd(gen)};
        const auto y = dft(x);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> s = 0;
            for (std::size_t j = 0; j < n; ++j) s += x[j] * std::polar(1.0, -2.0 * pi * double(j * k % n) / double(n));
            CHECK(std::abs(y[k] - s) < 1e-10);
        }
    }
}

TEST_CASE("spectrum of a pure sinusoid") {
    const std::size_t n = 2048;
    const double dt = 0.1;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * pi * 0.2 * dt * static_cast<double>(i));
    const auto s = spectrum(x, dt);
    CHECK(s.bin_width == doctest::Approx(1.0 / (n * dt)));
    REQUIRE(!s.ranked_peaks.empty());
    CHECK(std::abs(s.ranked_peaks[0].frequency - 0.2) <= s.bin_width);
    CHECK(s.frequencies.back() <= 0.5 / dt);
    for (std::size_t i = 1; i < s.frequencies.size(); ++i) CHECK(s.frequencies[i] > s.frequencies[i - 1]);
    for (std::size_t i = 1; i < s.ranked_peaks.size(); ++i) {
        CHECK(s.ranked_peaks[i].amplitude <= s.ranked_peaks[i - 1].amplitude);
    }
}

TEST_CASE("hann sidelobes of an on-bin sinusoid") {
    const std::size_t n = 2048;
    const double dt = 0.1, f = 41.0 / (n * dt);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = 1.7 * std::cos(2 * pi * f * dt * static_cast<double>(i) + 0.3);
    const auto s = spectrum(x, dt);
    REQUIRE(s.ranked_peaks[0].bin == 41);
    CHECK(s.ranked_peaks[0].amplitude == doctest::Approx(1.7).epsilon(1e-9));
    const double floor = s.ranked_peaks[0].amplitude * 1e-3;
    for (std::size_t k = 0; k < s.amplitudes.size(); ++k) {
        if (k + 1 < 41 || k > 42) CHECK(s.amplitudes[k] <= floor);
    }
}

TEST_CASE("spectrum edge cases") {
    CHECK(spectrum(std::vector<double>(64, 3.0), 0.1).ranked_peaks.empty());
    CHECK_THROWS_AS(spectrum(std::vector<double>(15, 1.0), 0.1), DataError);
    std::vector<double> bad(32, 1.0);
    bad[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(spectrum(bad, 0.1), DataError);
}

TEST_CASE("two tones rank by amplitude") {
    const std::size_t n = 1000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 0.1 * static_cast<double>(i);
        x[i] = 0.5 * std::sin(2 * pi * 0.9 * t) + 2.0 * std::sin(2 * pi * 0.3 * t);
    }
    const auto s = spectrum(x, 0.1);
    REQUIRE(s.ranked_peaks.size() >= 2);
    CHECK(std::abs(s.ranked_peaks[0].frequency - 0.3) <= s.bin_width);
    CHECK(std::abs(s.ranked_peaks[1].frequency - 0.9) <= s.bin_width);
}

TEST_CASE("pointwise and rms errors") {
    const auto ref = rows({{1.25, 0.0}, {2.0, 1.0}});
    CHECK(pointwise_error(ref, ref) == std::vector<std::vector<double>>{{0, 0}, {0, 0}});
    const auto pred = rows({{1.5, 0.1}, {2.25, 1.1}});
    const auto e = pointwise_error(pred, ref);
    CHECK(e[0][0] == 0.25);
    CHECK(e[1][0] == 0.25);
    const auto r = rms_error(pred, ref);
    CHECK(r[0] == doctest::Approx(0.25));
    CHECK(r[1] == doctest::Approx(0.1));
    CHECK_THROWS_AS(pointwise_error(pred, rows({{1.0, 1.0}})), DataError);
    CHECK(relative_rms_error(ref, ref, 2) == 0.0);
    CHECK(relative_rms_error(rows({{2.0}}), rows({{1.0}}), 1) == doctest::Approx(1.0));
}

TEST_CASE("surface error closed forms") {
    std::mt19937_64 gen(4);
    const auto s = random_series(gen, 30);
    CHECK(l2_surface_error(s, s) == 0.0);
    auto p = s.packed();
    p[0] += 0.3;
    CHECK(l2_surface_error(FourierSeries::from_packed(p), s) == doctest::Approx(std::sqrt(2 * pi) * 0.3).epsilon(1e-12));
    p = s.packed();
    p[30 + 3] -= 0.2;
    CHECK(l2_surface_error(FourierSeries::from_packed(p), s) == doctest::Approx(std::sqrt(pi) * 0.2).epsilon(1e-12));
    CHECK_THROWS_AS(l2_surface_error(FourierSeries(0, {1}, {1}), s), DataError);
}

TEST_CASE("surface error agrees with quadrature") {
    std::mt19937_64 gen(100);
    std::normal_distribution<double> nd(0.0, 0.1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ref = random_series(gen, 30);
        auto p = ref.packed();
        for (auto& v : p) v += nd(gen);
        const auto pred = FourierSeries::from_packed(p);
        const double quad = std::sqrt(oracle::trapezoid(
            [&](double th) {
                const double d = fourier_eval(pred, th) - fourier_eval(ref, th);
                return d * d;
            },
            -pi, pi, 4096));
        CHECK(std::abs(l2_surface_error(pred, ref) - quad) / quad < 1e-9);
    }
}

TEST_CASE("prediction prefix property and synchronization") {
    std::mt19937_64 gen(12);
    const auto m = init_model(2, 1, 4, {16, 16}, gen());
    std::vector<QoiVector> window;
    for (int i = 0; i < 5; ++i) window.emplace_back(std::vector<double>{0.1 * i, -0.05 * i});
    const ExplicitParams g({0.4});
    const auto full = predict_qoi(m, window, g, 60);
    for (std::size_t j : {1u, 2u, 17u, 60u}) {
        const auto part = predict_qoi(m, window, g, j);
        for (std::size_t s = 0; s < j; ++s) CHECK(part[s] == full[s]);
    }
    CHECK(predict_qoi(m, window, g, 60) == full);
    CHECK(rollout(m, window, g, 60) == full);
    CHECK_THROWS(predict_qoi(m, window, g, 0));
    CHECK_THROWS(predict_qoi(m, std::span(window).first(4), g, 3));
}

TEST_CASE("long horizon clock") {
    // 1950 predicted rows after a 50-row window at dt = 0.1
    const double dt = 0.1;
    const std::size_t n_w = 50, horizon = 1950;
    CHECK(static_cast<double>(n_w) * dt == doctest::Approx(5.0));
    CHECK(static_cast<double>(horizon) * dt == doctest::Approx(195.0));
    CHECK(static_cast<double>(n_w + horizon) * dt == doctest::Approx(200.0));
}
