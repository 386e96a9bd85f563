// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/model.hpp"

#include "tdt/core.hpp"
#include "tdt/error.hpp"
#include "tdt/rng.hpp"

#include <cmath>

namespace tdt {

Normalization Normalization::identity(std::size_t n) {
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

std::string_view to_string(OutputMode mode) noexcept {
    return mode == OutputMode::residual ? "residual" : "direct";
}

std::size_t FlowMapModel::parameter_count(const std::vector<std::size_t>& widths) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) n += widths[l + 1] * (widths[l] + 1);
    return n;
}

FlowMapModel::FlowMapModel(std::size_t qoi_dim, std::size_t gamma_dim, std::size_t memory_depth,
                           std::vector<std::size_t> widths, std::vector<double> parameters,
                           Normalization normalization, OutputMode output, double dt)
    : qoi_dim_(qoi_dim),
      gamma_dim_(gamma_dim),
      memory_depth_(memory_depth),
      widths_(std::move(widths)),
      parameters_(std::move(parameters)),
      normalization_(Normalization::identity(qoi_dim)),
      output_(output),
      dt_(dt) {
    if (qoi_dim_ == 0) {
        throw ConfigError("model QoI dimension must be positive");
    }
    if (widths_.size() < 2) {
        throw ConfigError("model needs at least an input and an output layer");
    }
    for (std::size_t w : widths_) {
        if (w == 0) throw ConfigError("layer width must be positive");
    }
    const std::size_t expect_in = (memory_depth_ + 1) * qoi_dim_ + gamma_dim_;
    if (widths_.front() != expect_in) {
        throw DataError(DataFault::dimension_mismatch, "input width " + std::to_string(widths_.front()) +
                                                           " but (n_M+1) n_V + n_gamma = " + std::to_string(expect_in));
    }
    if (widths_.back() != qoi_dim_) {
        throw DataError(DataFault::dimension_mismatch, "output width " + std::to_string(widths_.back()) +
                                                           " but n_V = " + std::to_string(qoi_dim_));
    }
    if (parameters_.size() != parameter_count(widths_)) {
        throw DataError(DataFault::size_mismatch, "parameter buffer holds " + std::to_string(parameters_.size()) +
                                                      " values, widths need " +
                                                      std::to_string(parameter_count(widths_)));
    }
    if (!all_finite(parameters_)) {
        throw DataError(DataFault::non_finite, "model weights contain a non-finite value");
    }
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        offsets_.push_back(off);
        off += widths_[l + 1] * (widths_[l] + 1);
    }
    set_normalization(std::move(normalization));
}

ConstWeights FlowMapModel::weights(std::size_t l) const {
    return ConstWeights(parameters_.data() + weight_offset(l), static_cast<Eigen::Index>(widths_[l + 1]),
                        static_cast<Eigen::Index>(widths_[l]));
}

ConstBias FlowMapModel::bias(std::size_t l) const {
    return ConstBias(parameters_.data() + bias_offset(l), static_cast<Eigen::Index>(widths_[l + 1]));
}

void FlowMapModel::set_normalization(Normalization normalization) {
    if (normalization.mean.size() != qoi_dim_ || normalization.scale.size() != qoi_dim_) {
        throw DataError(DataFault::dimension_mismatch, "normalization size differs from n_V");
    }
    if (!all_finite(normalization.mean) || !all_finite(normalization.scale)) {
        throw DataError(DataFault::non_finite, "normalization contains a non-finite value");
    }
    for (double s : normalization.scale) {
        if (!(s > 0.0)) throw DataError(DataFault::format, "normalization scale must be positive");
    }
    normalization_ = std::move(normalization);
}

FlowMapModel init_model(std::size_t qoi_dim, std::size_t gamma_dim, std::size_t memory_depth,
                        const std::vector<std::size_t>& hidden_widths, std::uint64_t seed, OutputMode output) {
    if (hidden_widths.empty()) {
        throw ConfigError("at least one hidden layer is required");
    }
    std::vector<std::size_t> widths;
    widths.push_back((memory_depth + 1) * qoi_dim + gamma_dim);
    for (std::size_t w : hidden_widths) {
        if (w == 0) throw ConfigError("hidden layer width must be positive");
        widths.push_back(w);
    }
    widths.push_back(qoi_dim);

    std::vector<double> params(FlowMapModel::parameter_count(widths), 0.0);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const std::size_t fan_in = widths[l], fan_out = widths[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Rng rng(seed, Stream::weight_init, l);
        for (std::size_t i = 0; i < fan_in * fan_out; ++i) params[off + i] = rng.uniform(-limit, limit);
        off += fan_out * (fan_in + 1);
    }
    return FlowMapModel(qoi_dim, gamma_dim, memory_depth, std::move(widths), std::move(params),
                        Normalization::identity(qoi_dim), output);
}

} // namespace tdt
