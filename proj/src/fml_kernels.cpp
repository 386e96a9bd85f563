// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batched rollout kernels. A chunk of c bursts is held as column-stacked
// matrices (one column per burst) so each layer is one matrix product.

#include "tdt/fml.hpp"

#include "tdt/error.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

namespace tdt {

namespace {

using Matrix = Eigen::MatrixXd;
using WeightsMap = Eigen::Map<RowMatrix>;
using BiasMap = Eigen::Map<Eigen::VectorXd>;

void check_batch(const FlowMapModel& model, BurstBatch batch, std::size_t n_r) {
    if (batch.empty()) {
        throw DataError(DataFault::shape, "empty batch");
    }
    const std::size_t n_l = burst_length(model.memory_depth(), n_r);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Burst& b = *batch[i];
        if (b.qoi_dim() != model.qoi_dim() || b.gamma().size() != model.gamma_dim()) {
            throw DataError(DataFault::dimension_mismatch, "burst " + std::to_string(i) +
                                                               " does not match the model's n_V / n_gamma");
        }
        if (b.size() != n_l) {
            throw DataError(DataFault::shape, "burst " + std::to_string(i) + " has length " + std::to_string(b.size()) +
                                                  ", expected n_M + 1 + n_R = " + std::to_string(n_l));
        }
    }
}

/// Forward/backward over one chunk of columns.
class ChunkRollout {
public:
    ChunkRollout(const FlowMapModel& model, std::size_t steps) : model_(model), steps_(steps) {}

    /// Loads normalized window columns; `targets` also loads the n_R targets.
    void load(BurstBatch chunk, bool targets) {
        const std::size_t n_v = model_.qoi_dim();
        const std::size_t n_w = model_.window_length();
        const auto& norm = model_.normalization();
        cols_ = static_cast<Eigen::Index>(chunk.size());
        states_.assign(n_w + steps_, Matrix(n_v, cols_));
        gamma_.resize(static_cast<Eigen::Index>(model_.gamma_dim()), cols_);
        const std::size_t loaded = targets ? n_w + steps_ : n_w;
        for (Eigen::Index c = 0; c < cols_; ++c) {
            const Burst& b = *chunk[static_cast<std::size_t>(c)];
            for (std::size_t t = 0; t < loaded; ++t) {
                const auto e = b.entry(t);
                for (std::size_t i = 0; i < n_v; ++i) {
                    states_[t](static_cast<Eigen::Index>(i), c) = (e[i] - norm.mean[i]) / norm.scale[i];
                }
            }
            const auto g = b.gamma().values();
            for (std::size_t i = 0; i < g.size(); ++i) gamma_(static_cast<Eigen::Index>(i), c) = g[i];
        }
        if (targets) {
            targets_.assign(states_.begin() + static_cast<std::ptrdiff_t>(n_w), states_.end());
        }
    }

    /// Loads one window given as raw QoI vectors.
    void load_window(std::span<const QoiVector> window, const ExplicitParams& gamma) {
        const std::size_t n_v = model_.qoi_dim();
        const auto& norm = model_.normalization();
        cols_ = 1;
        states_.assign(window.size() + steps_, Matrix(n_v, 1));
        for (std::size_t t = 0; t < window.size(); ++t) {
            for (std::size_t i = 0; i < n_v; ++i) {
                states_[t](static_cast<Eigen::Index>(i), 0) = (window[t][i] - norm.mean[i]) / norm.scale[i];
            }
        }
        gamma_.resize(static_cast<Eigen::Index>(gamma.size()), 1);
        for (std::size_t i = 0; i < gamma.size(); ++i) gamma_(static_cast<Eigen::Index>(i), 0) = gamma[i];
    }

    /// Runs the rollout; predictions land in states_[n_w + k].
    void forward(bool keep_activations) {
        const std::size_t n_v = model_.qoi_dim();
        const std::size_t n_w = model_.window_length();
        const std::size_t layers = model_.layer_count();
        if (keep_activations) acts_.assign(steps_, std::vector<Matrix>(layers + 1));
        Matrix input(static_cast<Eigen::Index>(model_.input_dim()), cols_);
        Matrix a, z;
        for (std::size_t k = 0; k < steps_; ++k) {
            for (std::size_t j = 0; j < n_w; ++j) {
                input.middleRows(static_cast<Eigen::Index>(j * n_v), static_cast<Eigen::Index>(n_v)) = states_[k + j];
            }
            if (model_.gamma_dim() > 0) input.bottomRows(gamma_.rows()) = gamma_;
            a = input;
            if (keep_activations) acts_[k][0] = input;
            for (std::size_t l = 0; l < layers; ++l) {
                z.noalias() = model_.weights(l) * a;
                z.colwise() += model_.bias(l);
                if (l + 1 < layers) {
                    a = z.array().tanh().matrix();
                    if (keep_activations) acts_[k][l + 1] = a;
                } else {
                    a.swap(z);
                }
            }
            if (model_.output_mode() == OutputMode::residual) a += states_[k + n_w - 1];
            states_[n_w + k] = a;
        }
    }

    /// Squared-error sum over the chunk at each rollout step.
    void residual_sums(std::span<double> sums) const {
        const std::size_t n_w = model_.window_length();
        for (std::size_t k = 0; k < steps_; ++k) sums[k] = (states_[n_w + k] - targets_[k]).squaredNorm();
    }

    /// Accumulates scale * d(sum of squared errors)/dparams into `grad`.
    void backward(double scale, std::span<double> grad) {
        const std::size_t n_v = model_.qoi_dim();
        const std::size_t n_w = model_.window_length();
        const std::size_t layers = model_.layer_count();
        const auto n_vi = static_cast<Eigen::Index>(n_v);

        std::vector<Matrix> g_pred(steps_);
        for (std::size_t k = 0; k < steps_; ++k) g_pred[k] = (2.0 * scale) * (states_[n_w + k] - targets_[k]);

        Matrix delta, back;
        for (std::size_t kk = steps_; kk-- > 0;) {
            const auto& act = acts_[kk];
            if (model_.output_mode() == OutputMode::residual && kk >= 1) g_pred[kk - 1] += g_pred[kk];
            delta = g_pred[kk];
            for (std::size_t l = layers; l-- > 0;) {
                const auto out = static_cast<Eigen::Index>(model_.widths()[l + 1]);
                const auto in = static_cast<Eigen::Index>(model_.widths()[l]);
                WeightsMap gw(grad.data() + model_.weight_offset(l), out, in);
                BiasMap gb(grad.data() + model_.bias_offset(l), out);
                gw.noalias() += delta * act[l].transpose();
                gb.noalias() += delta.rowwise().sum();
                if (l > 0) {
                    back.noalias() = model_.weights(l).transpose() * delta;
                    delta = back.cwiseProduct((1.0 - act[l].array().square()).matrix());
                }
            }
            // Window slots j >= n_w - kk hold earlier predictions.
            const std::size_t first = kk >= n_w ? 0 : n_w - kk;
            if (first < n_w) {
                const auto cols = static_cast<Eigen::Index>((n_w - first) * n_v);
                back.noalias() =
                    model_.weights(0).middleCols(static_cast<Eigen::Index>(first * n_v), cols).transpose() * delta;
                for (std::size_t j = first; j < n_w; ++j) {
                    const std::size_t p = kk + j - n_w;
                    g_pred[p] += back.middleRows(static_cast<Eigen::Index>((j - first) * n_v), n_vi);
                }
            }
        }
    }

    const Matrix& prediction(std::size_t k) const { return states_[model_.window_length() + k]; }

private:
    const FlowMapModel& model_;
    std::size_t steps_;
    Eigen::Index cols_ = 0;
    std::vector<Matrix> states_;
    std::vector<Matrix> targets_;
    Matrix gamma_;
    std::vector<std::vector<Matrix>> acts_;
};

int thread_count(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

LossGradient run_batch(const FlowMapModel& model, BurstBatch batch, std::size_t n_r, const KernelOptions& opts,
                       bool want_gradient) {
    check_batch(model, batch, n_r);
    const std::size_t chunk = std::max<std::size_t>(opts.chunk, 1);
    const std::size_t n_chunks = (batch.size() + chunk - 1) / chunk;
    const std::size_t n_params = model.parameters().size();
    const double scale = 1.0 / (static_cast<double>(n_r) * static_cast<double>(batch.size()));

    std::vector<std::vector<double>> sums(n_chunks, std::vector<double>(n_r, 0.0));
    std::vector<std::vector<double>> grads(want_gradient ? n_chunks : 0);
    std::vector<std::exception_ptr> errors(n_chunks);

    const auto n = static_cast<std::ptrdiff_t>(n_chunks);
#pragma omp parallel for schedule(static) num_threads(thread_count(opts.workers))
    for (std::ptrdiff_t ci = 0; ci < n; ++ci) {
        try {
            const std::size_t lo = static_cast<std::size_t>(ci) * chunk;
            const std::size_t hi = std::min(lo + chunk, batch.size());
            ChunkRollout r(model, n_r);
            r.load(batch.subspan(lo, hi - lo), true);
            r.forward(want_gradient);
            r.residual_sums(sums[ci]);
            if (want_gradient) {
                grads[ci].assign(n_params, 0.0);
                r.backward(scale, grads[ci]);
            }
        } catch (...) {
            errors[ci] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    LossGradient out;
    out.step_losses.assign(n_r, 0.0);
    for (std::size_t k = 0; k < n_r; ++k) {
        double s = 0.0;
        for (std::size_t ci = 0; ci < n_chunks; ++ci) s += sums[ci][k];
        out.step_losses[k] = s / static_cast<double>(batch.size());
    }
    double total = 0.0;
    for (double lk : out.step_losses) total += lk;
    out.loss = total / static_cast<double>(n_r);

    if (want_gradient) {
        out.gradient.assign(n_params, 0.0);
        for (std::size_t ci = 0; ci < n_chunks; ++ci) {
            for (std::size_t i = 0; i < n_params; ++i) out.gradient[i] += grads[ci][i];
        }
    }
    return out;
}

void check_window(const FlowMapModel& model, std::span<const QoiVector> window, const ExplicitParams& gamma) {
    if (window.size() != model.window_length()) {
        throw ConfigError("window has " + std::to_string(window.size()) + " entries, model needs n_M + 1 = " +
                          std::to_string(model.window_length()));
    }
    for (const auto& v : window) {
        if (v.size() != model.qoi_dim()) {
            throw ConfigError("window entry of dimension " + std::to_string(v.size()) + ", model n_V = " +
                              std::to_string(model.qoi_dim()));
        }
    }
    if (gamma.size() != model.gamma_dim()) {
        throw ConfigError("gamma of dimension " + std::to_string(gamma.size()) + ", model n_gamma = " +
                          std::to_string(model.gamma_dim()));
    }
}

} // namespace

std::vector<const Burst*> batch_of(std::span<const Burst> bursts) {
    std::vector<const Burst*> out;
    out.reserve(bursts.size());
    for (const auto& b : bursts) out.push_back(&b);
    return out;
}

QoiVector forward(const FlowMapModel& model, std::span<const QoiVector> window, const ExplicitParams& gamma) {
    check_window(model, window, gamma);
    ChunkRollout r(model, 1);
    r.load_window(window, gamma);
    r.forward(false);
    const auto& p = r.prediction(0);
    const auto& norm = model.normalization();
    std::vector<double> out(model.qoi_dim());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = p(static_cast<Eigen::Index>(i), 0) * norm.scale[i] + norm.mean[i];
    if (!all_finite(out)) {
        throw DivergenceError("rollout diverged at step 1: non-finite prediction");
    }
    return QoiVector(std::move(out));
}

std::vector<QoiVector> rollout(const FlowMapModel& model, std::span<const QoiVector> prefix,
                               const ExplicitParams& gamma, std::size_t k) {
    if (k < 1) {
        throw ConfigError("rollout length must be at least 1");
    }
    check_window(model, prefix, gamma);
    // Steps are taken one at a time through the raw QoI space so the result of
    // a k-step rollout is bit-identical to k chained forward calls.
    std::vector<QoiVector> window(prefix.begin(), prefix.end());
    std::vector<QoiVector> out;
    out.reserve(k);
    for (std::size_t step = 0; step < k; ++step) {
        QoiVector next = [&] {
            try {
                return forward(model, window, gamma);
            } catch (const DivergenceError&) {
                throw DivergenceError("rollout diverged at step " + std::to_string(step + 1) +
                                      ": non-finite prediction");
            }
        }();
        window.erase(window.begin());
        window.push_back(next);
        out.push_back(std::move(next));
    }
    return out;
}

double loss_multi_step(const FlowMapModel& model, BurstBatch batch, std::size_t n_r, const KernelOptions& opts) {
    return run_batch(model, batch, n_r, opts, false).loss;
}

double loss_one_step(const FlowMapModel& model, BurstBatch batch, const KernelOptions& opts) {
    const std::size_t n_w = model.window_length();
    // A one-step loss only reads the first n_M + 2 entries of each burst.
    std::vector<Burst> heads;
    heads.reserve(batch.size());
    for (const Burst* b : batch) {
        if (b->size() < n_w + 1) {
            throw DataError(DataFault::shape, "burst shorter than n_M + 2");
        }
        const auto flat = b->flat();
        heads.emplace_back(b->qoi_dim(), std::vector<double>(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>((n_w + 1) * b->qoi_dim())),
                           b->gamma());
    }
    const auto refs = batch_of(heads);
    return run_batch(model, refs, 1, opts, false).step_losses[0];
}

LossGradient loss_and_gradient(const FlowMapModel& model, BurstBatch batch, std::size_t n_r,
                               const KernelOptions& opts) {
    return run_batch(model, batch, n_r, opts, true);
}

} // namespace tdt
