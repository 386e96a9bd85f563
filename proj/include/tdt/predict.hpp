// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Using a trained flow map: long rollouts from a synchronization window,
// truncated Fourier series for surface quantities, spectra and error metrics.

#pragma once

#include "tdt/core.hpp"
#include "tdt/model.hpp"

#include <complex>
#include <span>
#include <vector>

namespace tdt {

/// Continuation V_{n_M+1 .. n_M+horizon} of the initial window. Depends on
/// nothing but the window and gamma.
std::vector<QoiVector> predict_qoi(const FlowMapModel& model, std::span<const QoiVector> initial_window,
                                   const ExplicitParams& gamma, std::size_t horizon_steps);

double fourier_eval(const FourierSeries& series, double theta);

/// Least-squares fit of the 2N+1 coefficients of an order-N series. Throws
/// DataError when the samples do not determine every coefficient.
FourierSeries fourier_fit(std::span<const double> theta, std::span<const double> values, std::size_t order);

struct SpectralPeak {
    double frequency = 0.0;
    double amplitude = 0.0;
    std::size_t bin = 0;
};

struct SpectrumResult {
    std::vector<double> frequencies;
    /// Single-sided amplitude; a sinusoid of amplitude A centred on a bin reads A.
    std::vector<double> amplitudes;
    /// Local maxima, largest first.
    std::vector<SpectralPeak> ranked_peaks;
    double bin_width = 0.0;
};

/// Mean-removed, Hann-windowed one-sided amplitude spectrum of a real signal
/// sampled every `dt`. Needs at least 16 finite samples.
SpectrumResult spectrum(std::span<const double> signal, double dt);

/// Discrete Fourier transform. Power-of-two lengths use an iterative radix-2
/// FFT; other lengths fall back to the direct sum.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x);

/// |pred - ref| per step and component.
std::vector<std::vector<double>> pointwise_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref);

/// Root mean square over steps of each component's error.
std::vector<double> rms_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref);

/// sqrt(sum_t |pred_t - ref_t|^2 / sum_t |ref_t|^2) over the first `steps`
/// entries.
double relative_rms_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref, std::size_t steps);

/// L2 norm over [-pi, pi] of the difference of two series, via Parseval.
double l2_surface_error(const FourierSeries& pred, const FourierSeries& ref);

} // namespace tdt
