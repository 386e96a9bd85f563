// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/predict.hpp"

#include "tdt/error.hpp"
#include "tdt/fml.hpp"

#include <cmath>

namespace tdt {

std::vector<QoiVector> predict_qoi(const FlowMapModel& model, std::span<const QoiVector> initial_window,
                                   const ExplicitParams& gamma, std::size_t horizon_steps) {
    return rollout(model, initial_window, gamma, horizon_steps);
}

namespace {

void check_aligned(std::span<const QoiVector> pred, std::span<const QoiVector> ref) {
    if (pred.size() != ref.size()) {
        throw DataError(DataFault::shape, "prediction has " + std::to_string(pred.size()) + " steps, reference " +
                                              std::to_string(ref.size()));
    }
    for (std::size_t t = 0; t < pred.size(); ++t) {
        if (pred[t].size() != ref[t].size()) {
            throw DataError(DataFault::dimension_mismatch, "component counts differ at step " + std::to_string(t));
        }
    }
}

} // namespace

std::vector<std::vector<double>> pointwise_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref) {
    check_aligned(pred, ref);
    std::vector<std::vector<double>> out(pred.size());
    for (std::size_t t = 0; t < pred.size(); ++t) {
        out[t].resize(pred[t].size());
        for (std::size_t i = 0; i < pred[t].size(); ++i) out[t][i] = std::abs(pred[t][i] - ref[t][i]);
    }
    return out;
}

std::vector<double> rms_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref) {
    check_aligned(pred, ref);
    if (pred.empty()) return {};
    std::vector<double> s(pred.front().size(), 0.0);
    for (std::size_t t = 0; t < pred.size(); ++t) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double d = pred[t][i] - ref[t][i];
            s[i] += d * d;
        }
    }
    for (double& v : s) v = std::sqrt(v / static_cast<double>(pred.size()));
    return s;
}

double relative_rms_error(std::span<const QoiVector> pred, std::span<const QoiVector> ref, std::size_t steps) {
    if (steps > pred.size() || steps > ref.size()) {
        throw DataError(DataFault::shape, "relative error window exceeds the series length");
    }
    check_aligned(pred.first(steps), ref.first(steps));
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t i = 0; i < ref[t].size(); ++i) {
            const double d = pred[t][i] - ref[t][i];
            num += d * d;
            den += ref[t][i] * ref[t][i];
        }
    }
    if (!(den > 0.0)) {
        throw DataError(DataFault::shape, "reference series is identically zero");
    }
    return std::sqrt(num / den);
}

} // namespace tdt
