// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial per-sample loss and gradient with plain loops. Independent of the
// Eigen kernels; used to cross-check them and as the benchmark baseline.

#include "tdt/error.hpp"
#include "tdt/fml.hpp"

#include <cmath>

namespace tdt::reference {

namespace {

struct Net {
    const FlowMapModel& model;

    double w(std::size_t l, std::size_t row, std::size_t col) const {
        return model.parameters()[model.weight_offset(l) + row * model.widths()[l] + col];
    }
    double b(std::size_t l, std::size_t row) const { return model.parameters()[model.bias_offset(l) + row]; }
};

} // namespace

LossGradient loss_and_gradient(const FlowMapModel& model, BurstBatch batch, std::size_t n_r) {
    const std::size_t n_v = model.qoi_dim();
    const std::size_t n_w = model.window_length();
    const std::size_t n_g = model.gamma_dim();
    const std::size_t layers = model.layer_count();
    const auto& widths = model.widths();
    const auto& norm = model.normalization();
    const Net net{model};
    const bool residual = model.output_mode() == OutputMode::residual;

    if (batch.empty()) throw DataError(DataFault::shape, "empty batch");
    const std::size_t n_l = burst_length(model.memory_depth(), n_r);

    LossGradient out;
    out.step_losses.assign(n_r, 0.0);
    out.gradient.assign(model.parameters().size(), 0.0);
    const double scale = 1.0 / (static_cast<double>(n_r) * static_cast<double>(batch.size()));

    for (const Burst* burst : batch) {
        if (burst->size() != n_l || burst->qoi_dim() != n_v || burst->gamma().size() != n_g) {
            throw DataError(DataFault::shape, "burst does not match model and n_R");
        }
        // seq[t] holds normalized data for t < n_w and predictions after.
        std::vector<std::vector<double>> seq(n_l, std::vector<double>(n_v));
        std::vector<std::vector<double>> target(n_r, std::vector<double>(n_v));
        for (std::size_t t = 0; t < n_l; ++t) {
            const auto e = burst->entry(t);
            for (std::size_t i = 0; i < n_v; ++i) {
                const double v = (e[i] - norm.mean[i]) / norm.scale[i];
                if (t < n_w) seq[t][i] = v;
                else target[t - n_w][i] = v;
            }
        }
        const auto gamma = burst->gamma().values();

        // acts[k][l]: input of layer l at rollout step k (acts[k][0] = window).
        std::vector<std::vector<std::vector<double>>> acts(n_r, std::vector<std::vector<double>>(layers + 1));
        for (std::size_t k = 0; k < n_r; ++k) {
            auto& in = acts[k][0];
            for (std::size_t j = 0; j < n_w; ++j) in.insert(in.end(), seq[k + j].begin(), seq[k + j].end());
            in.insert(in.end(), gamma.begin(), gamma.end());
            for (std::size_t l = 0; l < layers; ++l) {
                const auto& a = acts[k][l];
                auto& next = acts[k][l + 1];
                next.assign(widths[l + 1], 0.0);
                for (std::size_t r = 0; r < widths[l + 1]; ++r) {
                    double z = net.b(l, r);
                    for (std::size_t c = 0; c < widths[l]; ++c) z += net.w(l, r, c) * a[c];
                    next[r] = (l + 1 < layers) ? std::tanh(z) : z;
                }
            }
            auto pred = acts[k][layers];
            if (residual) {
                for (std::size_t i = 0; i < n_v; ++i) pred[i] += seq[k + n_w - 1][i];
            }
            seq[n_w + k] = pred;
            double s = 0.0;
            for (std::size_t i = 0; i < n_v; ++i) {
                const double r = pred[i] - target[k][i];
                s += r * r;
            }
            out.step_losses[k] += s;
        }

        std::vector<std::vector<double>> g_pred(n_r, std::vector<double>(n_v));
        for (std::size_t k = 0; k < n_r; ++k) {
            for (std::size_t i = 0; i < n_v; ++i) g_pred[k][i] = 2.0 * scale * (seq[n_w + k][i] - target[k][i]);
        }
        for (std::size_t k = n_r; k-- > 0;) {
            if (residual && k >= 1) {
                for (std::size_t i = 0; i < n_v; ++i) g_pred[k - 1][i] += g_pred[k][i];
            }
            std::vector<double> delta = g_pred[k];
            for (std::size_t l = layers; l-- > 0;) {
                const auto& a = acts[k][l];
                for (std::size_t r = 0; r < widths[l + 1]; ++r) {
                    for (std::size_t c = 0; c < widths[l]; ++c) {
                        out.gradient[model.weight_offset(l) + r * widths[l] + c] += delta[r] * a[c];
                    }
                    out.gradient[model.bias_offset(l) + r] += delta[r];
                }
                std::vector<double> back(widths[l], 0.0);
                for (std::size_t c = 0; c < widths[l]; ++c) {
                    for (std::size_t r = 0; r < widths[l + 1]; ++r) back[c] += net.w(l, r, c) * delta[r];
                }
                if (l > 0) {
                    for (std::size_t c = 0; c < widths[l]; ++c) back[c] *= 1.0 - a[c] * a[c];
                    delta = std::move(back);
                } else {
                    for (std::size_t j = 0; j < n_w; ++j) {
                        const std::size_t t = k + j;
                        if (t < n_w) continue;
                        for (std::size_t i = 0; i < n_v; ++i) g_pred[t - n_w][i] += back[j * n_v + i];
                    }
                }
            }
        }
    }

    double total = 0.0;
    for (auto& lk : out.step_losses) {
        lk /= static_cast<double>(batch.size());
        total += lk;
    }
    out.loss = total / static_cast<double>(n_r);
    return out;
}

} // namespace tdt::reference
