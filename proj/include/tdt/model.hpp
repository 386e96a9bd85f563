// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// The learnable flow map G: a fully connected network that maps the n_M + 1
// most recent QoI vectors (oldest first) and gamma to the next QoI vector.
//
// Parameters live in one flat buffer, layer by layer: the weight matrix of
// shape (out, in) in row-major order, then its bias. The same order is used
// for gradients, the optimizer state and the model file.

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdt {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMatrix>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;

/// Per-component affine map to the network's internal space: (v - mean) / scale.
struct Normalization {
    std::vector<double> mean;
    std::vector<double> scale;

    static Normalization identity(std::size_t n);
    friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// How the last layer's output becomes the next state. `direct`: the output
/// is the next (normalized) state. `residual`: the output is added to the
/// newest window entry.
enum class OutputMode { direct, residual };

std::string_view to_string(OutputMode mode) noexcept;

class FlowMapModel {
public:
    FlowMapModel(std::size_t qoi_dim, std::size_t gamma_dim, std::size_t memory_depth, std::vector<std::size_t> widths,
                 std::vector<double> parameters, Normalization normalization,
                 OutputMode output = OutputMode::direct, double dt = 0.0);

    std::size_t qoi_dim() const noexcept { return qoi_dim_; }
    std::size_t gamma_dim() const noexcept { return gamma_dim_; }
    std::size_t memory_depth() const noexcept { return memory_depth_; }
    std::size_t window_length() const noexcept { return memory_depth_ + 1; }
    std::size_t input_dim() const noexcept { return widths_.front(); }
    const std::vector<std::size_t>& widths() const noexcept { return widths_; }
    std::size_t layer_count() const noexcept { return widths_.size() - 1; }
    OutputMode output_mode() const noexcept { return output_; }
    /// QoI recording step of the training data; 0 when unknown.
    double dt() const noexcept { return dt_; }
    void set_dt(double dt) { dt_ = dt; }

    std::span<const double> parameters() const noexcept { return parameters_; }
    std::span<double> parameters() noexcept { return parameters_; }

    /// Offset of layer `l`'s weights in the flat buffer; bias follows them.
    std::size_t weight_offset(std::size_t l) const { return offsets_[l]; }
    std::size_t bias_offset(std::size_t l) const { return offsets_[l] + widths_[l + 1] * widths_[l]; }
    ConstWeights weights(std::size_t l) const;
    ConstBias bias(std::size_t l) const;

    const Normalization& normalization() const noexcept { return normalization_; }
    void set_normalization(Normalization normalization);

    static std::size_t parameter_count(const std::vector<std::size_t>& widths);

    friend bool operator==(const FlowMapModel&, const FlowMapModel&) = default;

private:
    std::size_t qoi_dim_;
    std::size_t gamma_dim_;
    std::size_t memory_depth_;
    std::vector<std::size_t> widths_;
    std::vector<std::size_t> offsets_;
    std::vector<double> parameters_;
    Normalization normalization_;
    OutputMode output_;
    double dt_;
};

/// Layer widths [(n_M+1) n_V + n_gamma, hidden..., n_V], Glorot-uniform
/// weights from `seed`, zero biases, identity normalization.
FlowMapModel init_model(std::size_t qoi_dim, std::size_t gamma_dim, std::size_t memory_depth,
                        const std::vector<std::size_t>& hidden_widths, std::uint64_t seed,
                        OutputMode output = OutputMode::direct);

/// Model file: "FMLM", u64 header length, a JSON header, then the flat
/// parameter buffer as little-endian f64.
void save_model(const FlowMapModel& model, const std::string& path);
FlowMapModel load_model(const std::string& path);

} // namespace tdt
