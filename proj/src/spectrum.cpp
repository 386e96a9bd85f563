// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/error.hpp"
#include "tdt/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tdt {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<std::complex<double>> fft_radix2(std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> a(x.begin(), x.end());
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            // Twiddles straight from the angle; recurrences lose digits at large n.
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            const std::complex<double> w(std::cos(ang), std::sin(ang));
            for (std::size_t i = 0; i < n; i += len) {
                const auto u = a[i + k];
                const auto v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
    return a;
}

std::vector<std::complex<double>> dft_direct(std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> s = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t kt = (k * t) % n;
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(kt) / static_cast<double>(n);
            s += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = s;
    }
    return out;
}

} // namespace

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x) {
    if (x.empty()) return {};
    return is_power_of_two(x.size()) ? fft_radix2(x) : dft_direct(x);
}

SpectrumResult spectrum(std::span<const double> signal, double dt) {
    const std::size_t n = signal.size();
    if (n < 16) {
        throw DataError(DataFault::shape, "spectrum needs at least 16 samples, got " + std::to_string(n));
    }
    if (!all_finite(signal)) {
        throw DataError(DataFault::non_finite, "spectrum input contains a non-finite sample");
    }
    if (!(std::isfinite(dt) && dt > 0.0)) {
        throw ConfigError("sampling interval must be finite and positive");
    }

    double mean = 0.0, peak_abs = 0.0;
    for (double v : signal) {
        mean += v;
        peak_abs = std::max(peak_abs, std::abs(v));
    }
    mean /= static_cast<double>(n);

    // Periodic Hann: an on-bin sinusoid leaks into its two neighbours only.
    std::vector<std::complex<double>> x(n);
    double wsum = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(n)));
        wsum += w;
        x[t] = (signal[t] - mean) * w;
    }
    const auto spec = dft(x);

    SpectrumResult out;
    const std::size_t bins = n / 2 + 1;
    out.bin_width = 1.0 / (static_cast<double>(n) * dt);
    out.frequencies.resize(bins);
    out.amplitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
        out.frequencies[k] = static_cast<double>(k) * out.bin_width;
        out.amplitudes[k] = (edge ? 1.0 : 2.0) * std::abs(spec[k]) / wsum;
    }

    // Rounding residue of a flat signal is not a peak.
    const double floor = 1e-12 * peak_abs;
    const auto& amp = out.amplitudes;
    for (std::size_t k = 0; k < bins; ++k) {
        if (!(amp[k] > floor)) continue;
        const bool left = k == 0 || amp[k] > amp[k - 1];
        const bool right = k + 1 == bins || amp[k] >= amp[k + 1];
        if (left && right) out.ranked_peaks.push_back({out.frequencies[k], amp[k], k});
    }
    std::stable_sort(out.ranked_peaks.begin(), out.ranked_peaks.end(),
                     [](const SpectralPeak& a, const SpectralPeak& b) { return a.amplitude > b.amplitude; });
    return out;
}

} // namespace tdt
