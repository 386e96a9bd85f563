// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation and training of the flow map: forward pass, k-step rollout,
// multi-step recurrent loss with exact backpropagation through the rollout,
// Adam, and the decaying triangular learning-rate schedule.
//
// Two implementations of loss and gradient exist. The batched kernel in
// fml_kernels.cpp splits a batch into fixed-size column chunks processed in
// parallel with OpenMP and reduced in chunk order, so results do not depend
// on the thread count. The per-sample serial reference in fml_reference.cpp
// uses plain loops and is kept for tests and benchmarks.

#pragma once

#include "tdt/core.hpp"
#include "tdt/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tdt {

/// Next QoI vector from a window of exactly n_M + 1 entries, oldest first.
QoiVector forward(const FlowMapModel& model, std::span<const QoiVector> window, const ExplicitParams& gamma);

/// Feeds each prediction back into the sliding window and returns the k
/// predictions that follow `prefix` (n_M + 1 entries). Throws DivergenceError
/// naming the step when a prediction is not finite.
std::vector<QoiVector> rollout(const FlowMapModel& model, std::span<const QoiVector> prefix,
                               const ExplicitParams& gamma, std::size_t k);

/// Non-owning batch of bursts.
using BurstBatch = std::span<const Burst* const>;

std::vector<const Burst*> batch_of(std::span<const Burst> bursts);

struct LossGradient {
    double loss = 0.0;
    /// Batch-mean squared error at each rollout step, L_1..L_{n_R}.
    std::vector<double> step_losses;
    /// dL/dparameters, laid out like FlowMapModel::parameters().
    std::vector<double> gradient;
};

struct KernelOptions {
    /// Samples per chunk; fixes the reduction order.
    std::size_t chunk = 16;
    /// OpenMP threads, 0 = runtime default.
    int workers = 0;
};

/// Multi-step loss L = (1/n_R) sum_k L_k in normalized QoI space, where L_k
/// averages over the batch the squared norm of the k-step rollout error.
/// Throws DataError when a burst is not n_M + 1 + n_R long.
double loss_multi_step(const FlowMapModel& model, BurstBatch batch, std::size_t n_r, const KernelOptions& opts = {});
/// L_1 alone.
double loss_one_step(const FlowMapModel& model, BurstBatch batch, const KernelOptions& opts = {});

/// Loss and exact gradient, backpropagated through all n_R rollout steps.
LossGradient loss_and_gradient(const FlowMapModel& model, BurstBatch batch, std::size_t n_r,
                               const KernelOptions& opts = {});

namespace reference {

/// Serial per-sample implementation of loss_and_gradient.
LossGradient loss_and_gradient(const FlowMapModel& model, BurstBatch batch, std::size_t n_r);

} // namespace reference

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

struct AdamSettings {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> gradient, AdamState& state, double lr,
               const AdamSettings& settings = {});

struct TrainConfig {
    std::size_t recurrent_steps = 10;
    std::size_t batch_size = 64;
    std::size_t epochs = 3000;
    double lr_base = 1e-7;
    double lr_max = 1e-3;
    double lr_decay = 0.999997;
    std::size_t lr_half_cycle = 2000;
    AdamSettings adam;
    std::uint64_t seed = 0;
    KernelOptions kernel;

    std::vector<std::string> problems() const;
    void validate() const;
};

/// lr_base + (lr_max - lr_base) * tri(iteration) * lr_decay^iteration, with
/// tri the unit triangle wave rising from 0 to 1 over lr_half_cycle.
double cyclic_lr(std::uint64_t iteration, const TrainConfig& config);

/// Per-component mean and population standard deviation over every entry of
/// every burst; zero deviations become 1.
Normalization fit_normalization(const BurstDataset& dataset);

struct TrainingPlan {
    std::size_t batches_per_epoch = 0;
    std::uint64_t total_iterations = 0;
};

/// Checks model, dataset header and config against each other without any
/// computation. `n_data` is the dataset size.
TrainingPlan plan_training(const FlowMapModel& model, const DatasetHeader& header, std::size_t n_data,
                           const TrainConfig& config);

struct EpochReport {
    std::size_t epoch = 0;
    double mean_loss = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    FlowMapModel model;
    std::vector<double> epoch_losses;
};

/// Fits normalization, then runs `epochs` passes of shuffled mini-batches with
/// Adam under cyclic_lr. Throws DivergenceError (epoch, batch, lr) when a
/// batch loss is not finite.
TrainResult train(FlowMapModel model, const BurstDataset& dataset, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch = {});

} // namespace tdt
