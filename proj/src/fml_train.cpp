// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/error.hpp"
#include "tdt/fml.hpp"
#include "tdt/rng.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace tdt {

void adam_step(std::span<double> params, std::span<const double> gradient, AdamState& state, double lr,
               const AdamSettings& settings) {
    if (gradient.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw ConfigError("optimizer state does not match the parameter count");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(settings.beta1, t);
    const double c2 = 1.0 - std::pow(settings.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = gradient[i];
        state.m[i] = settings.beta1 * state.m[i] + (1.0 - settings.beta1) * g;
        state.v[i] = settings.beta2 * state.v[i] + (1.0 - settings.beta2) * g * g;
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + settings.eps);
    }
}

std::vector<std::string> TrainConfig::problems() const {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* name) {
        if (!(std::isfinite(v) && v > 0.0)) out.push_back(std::string(name) + " must be finite and positive");
    };
    if (recurrent_steps < 1) out.push_back("n_R must be at least 1");
    if (batch_size < 1) out.push_back("batch_size must be at least 1");
    positive(lr_base, "lr_base");
    positive(lr_max, "lr_max");
    if (lr_base > lr_max) out.push_back("lr_base must not exceed lr_max");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) out.push_back("lr_decay must lie in (0, 1]");
    if (lr_half_cycle < 1) out.push_back("lr_half_cycle must be at least 1");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) out.push_back("adam_beta1 must lie in [0, 1)");
    if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) out.push_back("adam_beta2 must lie in [0, 1)");
    positive(adam.eps, "adam_eps");
    if (kernel.chunk < 1) out.push_back("kernel chunk must be at least 1");
    return out;
}

void TrainConfig::validate() const {
    const auto issues = problems();
    if (!issues.empty()) {
        std::string msg = "invalid training config:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

double cyclic_lr(std::uint64_t iteration, const TrainConfig& config) {
    const std::uint64_t half = config.lr_half_cycle;
    const std::uint64_t phase = iteration % (2 * half);
    const double tri = phase <= half ? static_cast<double>(phase) / static_cast<double>(half)
                                     : static_cast<double>(2 * half - phase) / static_cast<double>(half);
    const double envelope = std::pow(config.lr_decay, static_cast<double>(iteration));
    return config.lr_base + (config.lr_max - config.lr_base) * tri * envelope;
}

Normalization fit_normalization(const BurstDataset& dataset) {
    const std::size_t n_v = dataset.header().qoi_dim;
    std::vector<double> sum(n_v, 0.0), count(n_v, 0.0);
    for (const auto& b : dataset.bursts()) {
        for (std::size_t t = 0; t < b.size(); ++t) {
            const auto e = b.entry(t);
            for (std::size_t i = 0; i < n_v; ++i) sum[i] += e[i];
        }
        for (std::size_t i = 0; i < n_v; ++i) count[i] += static_cast<double>(b.size());
    }
    Normalization norm = Normalization::identity(n_v);
    if (dataset.size() == 0) return norm;
    for (std::size_t i = 0; i < n_v; ++i) norm.mean[i] = sum[i] / count[i];
    std::vector<double> sq(n_v, 0.0);
    for (const auto& b : dataset.bursts()) {
        for (std::size_t t = 0; t < b.size(); ++t) {
            const auto e = b.entry(t);
            for (std::size_t i = 0; i < n_v; ++i) {
                const double d = e[i] - norm.mean[i];
                sq[i] += d * d;
            }
        }
    }
    for (std::size_t i = 0; i < n_v; ++i) {
        const double sd = std::sqrt(sq[i] / count[i]);
        norm.scale[i] = sd > 0.0 ? sd : 1.0;
    }
    return norm;
}

TrainingPlan plan_training(const FlowMapModel& model, const DatasetHeader& header, std::size_t n_data,
                           const TrainConfig& config) {
    config.validate();
    std::vector<std::string> issues;
    if (header.qoi_dim != model.qoi_dim()) {
        issues.push_back("dataset n_V = " + std::to_string(header.qoi_dim) + ", model n_V = " +
                         std::to_string(model.qoi_dim()));
    }
    if (header.gamma_dim != model.gamma_dim()) {
        issues.push_back("dataset n_gamma = " + std::to_string(header.gamma_dim) + ", model n_gamma = " +
                         std::to_string(model.gamma_dim()));
    }
    if (header.memory_depth != model.memory_depth()) {
        issues.push_back("dataset n_M = " + std::to_string(header.memory_depth) + ", model n_M = " +
                         std::to_string(model.memory_depth()));
    }
    if (header.recurrent_steps != config.recurrent_steps) {
        issues.push_back("dataset n_R = " + std::to_string(header.recurrent_steps) + ", training n_R = " +
                         std::to_string(config.recurrent_steps));
    }
    if (n_data == 0) issues.push_back("dataset is empty");
    if (!issues.empty()) {
        std::string msg = "dataset and model disagree:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw DataError(DataFault::dimension_mismatch, msg);
    }
    TrainingPlan plan;
    plan.batches_per_epoch = (n_data + config.batch_size - 1) / config.batch_size;
    plan.total_iterations = static_cast<std::uint64_t>(plan.batches_per_epoch) * config.epochs;
    return plan;
}

TrainResult train(FlowMapModel model, const BurstDataset& dataset, const TrainConfig& config,
                  const std::function<void(const EpochReport&)>& on_epoch) {
    const auto plan = plan_training(model, dataset.header(), dataset.size(), config);
    const auto issues = validate_dataset(dataset);
    if (!issues.empty()) {
        throw DataError(DataFault::shape, "dataset failed validation: " + issues.front());
    }
    model.set_normalization(fit_normalization(dataset));
    model.set_dt(dataset.header().dt);

    TrainResult result{model, {}};
    FlowMapModel& m = result.model;
    AdamState adam(m.parameters().size());
    const std::size_t n = dataset.size();
    std::vector<std::size_t> order(n);
    std::vector<const Burst*> batch;
    std::uint64_t iteration = 0;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(config.seed, Stream::epoch_shuffle, epoch);
        for (std::size_t i = n; i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i));
            std::swap(order[i - 1], order[j]);
        }

        double weighted = 0.0;
        double lr = 0.0;
        for (std::size_t bi = 0; bi < plan.batches_per_epoch; ++bi) {
            const std::size_t lo = bi * config.batch_size;
            const std::size_t hi = std::min(lo + config.batch_size, n);
            batch.clear();
            for (std::size_t i = lo; i < hi; ++i) batch.push_back(&dataset[order[i]]);

            lr = cyclic_lr(iteration, config);
            const LossGradient lg = loss_and_gradient(m, batch, config.recurrent_steps, config.kernel);
            if (!std::isfinite(lg.loss) || !all_finite(lg.gradient)) {
                std::ostringstream os;
                os << "training diverged at epoch " << epoch << ", batch " << bi << " (lr " << lr << ")";
                throw DivergenceError(os.str());
            }
            adam_step(m.parameters(), lg.gradient, adam, lr, config.adam);
            weighted += lg.loss * static_cast<double>(hi - lo);
            ++iteration;
        }
        const double mean = weighted / static_cast<double>(n);
        result.epoch_losses.push_back(mean);
        if (on_epoch) on_epoch({epoch, mean, lr});
    }
    return result;
}

} // namespace tdt
