// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Domain types shared by the whole toolkit. All of them are immutable after
// construction; constructors reject non-finite values.
//
// Hidden parameters of a simulator have no field anywhere in this header.
// A Trajectory or Burst only knows the recorded QoI series and the explicit
// parameters gamma.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tdt {

/// Burst length n_L = (n_M + 1) + n_R. Throws ConfigError when n_R < 1.
std::size_t burst_length(std::size_t memory_depth, std::size_t recurrent_steps);

/// Returns true when every value is finite.
bool all_finite(std::span<const double> values) noexcept;

/// A real vector with finite entries. Base for the QoI and gamma strong types.
template <class Tag>
class FiniteVector {
public:
    FiniteVector() = default;
    explicit FiniteVector(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const FiniteVector&, const FiniteVector&) = default;

private:
    std::vector<double> values_;
};

struct QoiTag {};
struct GammaTag {};

/// One time step of the targeted twin's state, V in R^{n_V}.
using QoiVector = FiniteVector<QoiTag>;
/// Explicit parameters gamma in R^{n_gamma}; commonly empty.
using ExplicitParams = FiniteVector<GammaTag>;

extern template class FiniteVector<QoiTag>;
extern template class FiniteVector<GammaTag>;

/// QoI time series of one full-DT run, stored row-major (entry-major).
class Trajectory {
public:
    Trajectory(double dt, std::size_t qoi_dim, std::vector<double> flat, ExplicitParams gamma);
    Trajectory(double dt, const std::vector<QoiVector>& qois, ExplicitParams gamma);

    double dt() const noexcept { return dt_; }
    std::size_t qoi_dim() const noexcept { return qoi_dim_; }
    std::size_t size() const noexcept { return flat_.size() / qoi_dim_; }
    std::span<const double> entry(std::size_t i) const;
    std::span<const double> flat() const noexcept { return flat_; }
    const ExplicitParams& gamma() const noexcept { return gamma_; }

    friend bool operator==(const Trajectory&, const Trajectory&) = default;

private:
    double dt_;
    std::size_t qoi_dim_;
    std::vector<double> flat_;
    ExplicitParams gamma_;
};

/// n_L consecutive QoI entries plus gamma; one training record.
class Burst {
public:
    Burst(std::size_t qoi_dim, std::vector<double> flat, ExplicitParams gamma);

    std::size_t qoi_dim() const noexcept { return qoi_dim_; }
    std::size_t size() const noexcept { return flat_.size() / qoi_dim_; }
    std::span<const double> entry(std::size_t i) const;
    std::span<const double> flat() const noexcept { return flat_; }
    const ExplicitParams& gamma() const noexcept { return gamma_; }

    friend bool operator==(const Burst&, const Burst&) = default;

private:
    std::size_t qoi_dim_;
    std::vector<double> flat_;
    ExplicitParams gamma_;
};

struct DatasetHeader {
    std::uint32_t qoi_dim = 0;
    std::uint32_t gamma_dim = 0;
    std::uint32_t memory_depth = 0;
    std::uint32_t recurrent_steps = 1;
    double dt = 0.0;

    std::size_t burst_length() const { return tdt::burst_length(memory_depth, recurrent_steps); }
    friend bool operator==(const DatasetHeader&, const DatasetHeader&) = default;
};

/// The training set D. Construction checks the header only; per-burst shape
/// rules are reported by validate_dataset so that malformed data can be
/// inspected rather than thrown away.
class BurstDataset {
public:
    BurstDataset(DatasetHeader header, std::vector<Burst> bursts);

    const DatasetHeader& header() const noexcept { return header_; }
    const std::vector<Burst>& bursts() const noexcept { return bursts_; }
    std::size_t size() const noexcept { return bursts_.size(); }
    const Burst& operator[](std::size_t i) const { return bursts_[i]; }

    friend bool operator==(const BurstDataset&, const BurstDataset&) = default;

private:
    DatasetHeader header_;
    std::vector<Burst> bursts_;
};

/// Returns one description per invariant violation; empty iff valid.
/// `expected_bursts` checks N_data = n_B * N_sim when the caller knows it.
std::vector<std::string> validate_dataset(const BurstDataset& dataset,
                                          std::optional<std::size_t> expected_bursts = std::nullopt);

/// Truncated Fourier series a0 + sum_n a_n cos(n t) + b_n sin(n t).
class FourierSeries {
public:
    FourierSeries(double a0, std::vector<double> a, std::vector<double> b);

    /// Unpacks the QoI layout (a0, a_1..a_N, b_1..b_N); size must be odd.
    static FourierSeries from_packed(std::span<const double> packed);
    std::vector<double> packed() const;

    double a0() const noexcept { return a0_; }
    std::span<const double> a() const noexcept { return a_; }
    std::span<const double> b() const noexcept { return b_; }
    std::size_t order() const noexcept { return a_.size(); }
    std::size_t coefficient_count() const noexcept { return 2 * a_.size() + 1; }

    friend bool operator==(const FourierSeries&, const FourierSeries&) = default;

private:
    double a0_;
    std::vector<double> a_;
    std::vector<double> b_;
};

} // namespace tdt
