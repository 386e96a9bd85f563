// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/core.hpp"

#include "tdt/error.hpp"

#include <algorithm>
#include <cmath>

namespace tdt {

const char* to_string(DataFault fault) noexcept {
    switch (fault) {
    case DataFault::io: return "io error";
    case DataFault::magic_mismatch: return "magic mismatch";
    case DataFault::version_mismatch: return "version mismatch";
    case DataFault::truncated: return "truncated file";
    case DataFault::size_mismatch: return "size inconsistency";
    case DataFault::dimension_mismatch: return "dimension mismatch";
    case DataFault::format: return "format error";
    case DataFault::non_finite: return "non-finite value";
    case DataFault::shape: return "shape error";
    }
    return "data error";
}

std::size_t burst_length(std::size_t memory_depth, std::size_t recurrent_steps) {
    if (recurrent_steps < 1) {
        throw ConfigError("n_R must be at least 1");
    }
    return memory_depth + 1 + recurrent_steps;
}

bool all_finite(std::span<const double> values) noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

template <class Tag>
FiniteVector<Tag>::FiniteVector(std::vector<double> values) : values_(std::move(values)) {
    if (!all_finite(values_)) {
        throw DataError(DataFault::non_finite, "vector contains a non-finite entry");
    }
}

template class FiniteVector<QoiTag>;
template class FiniteVector<GammaTag>;

namespace {

void check_flat(std::size_t qoi_dim, std::span<const double> flat, const char* what) {
    if (qoi_dim == 0) {
        throw DataError(DataFault::shape, std::string(what) + " with zero QoI dimension");
    }
    if (flat.size() % qoi_dim != 0) {
        throw DataError(DataFault::shape, std::string(what) + " storage is not a whole number of entries");
    }
    if (!all_finite(flat)) {
        throw DataError(DataFault::non_finite, std::string(what) + " contains a non-finite QoI value");
    }
}

std::vector<double> flatten(const std::vector<QoiVector>& qois) {
    if (qois.empty()) {
        throw DataError(DataFault::shape, "trajectory without entries");
    }
    const std::size_t n = qois.front().size();
    std::vector<double> flat;
    flat.reserve(n * qois.size());
    for (const auto& q : qois) {
        if (q.size() != n) {
            throw DataError(DataFault::dimension_mismatch, "QoI vectors of unequal length in one trajectory");
        }
        flat.insert(flat.end(), q.values().begin(), q.values().end());
    }
    return flat;
}

} // namespace

Trajectory::Trajectory(double dt, std::size_t qoi_dim, std::vector<double> flat, ExplicitParams gamma)
    : dt_(dt), qoi_dim_(qoi_dim), flat_(std::move(flat)), gamma_(std::move(gamma)) {
    if (!(std::isfinite(dt_) && dt_ > 0.0)) {
        throw DataError(DataFault::format, "trajectory dt must be finite and positive");
    }
    check_flat(qoi_dim_, flat_, "trajectory");
    if (flat_.empty()) {
        throw DataError(DataFault::shape, "trajectory without entries");
    }
}

Trajectory::Trajectory(double dt, const std::vector<QoiVector>& qois, ExplicitParams gamma)
    : Trajectory(dt, qois.empty() ? 0 : qois.front().size(), flatten(qois), std::move(gamma)) {}

std::span<const double> Trajectory::entry(std::size_t i) const {
    return std::span<const double>(flat_).subspan(i * qoi_dim_, qoi_dim_);
}

Burst::Burst(std::size_t qoi_dim, std::vector<double> flat, ExplicitParams gamma)
    : qoi_dim_(qoi_dim), flat_(std::move(flat)), gamma_(std::move(gamma)) {
    check_flat(qoi_dim_, flat_, "burst");
}

std::span<const double> Burst::entry(std::size_t i) const {
    return std::span<const double>(flat_).subspan(i * qoi_dim_, qoi_dim_);
}

BurstDataset::BurstDataset(DatasetHeader header, std::vector<Burst> bursts)
    : header_(header), bursts_(std::move(bursts)) {
    if (!(std::isfinite(header_.dt) && header_.dt > 0.0)) {
        throw DataError(DataFault::format, "dataset dt must be finite and positive");
    }
    if (header_.qoi_dim == 0) {
        throw DataError(DataFault::shape, "dataset with zero QoI dimension");
    }
    if (header_.recurrent_steps < 1) {
        throw DataError(DataFault::format, "dataset n_R must be at least 1");
    }
}

std::vector<std::string> validate_dataset(const BurstDataset& dataset, std::optional<std::size_t> expected_bursts) {
    std::vector<std::string> issues;
    const auto& h = dataset.header();
    const std::size_t n_l = h.burst_length();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Burst& b = dataset[i];
        if (b.qoi_dim() != h.qoi_dim) {
            issues.push_back("burst " + std::to_string(i) + ": QoI dimension " + std::to_string(b.qoi_dim()) +
                             ", expected " + std::to_string(h.qoi_dim));
            continue;
        }
        if (b.size() != n_l) {
            issues.push_back("burst " + std::to_string(i) + ": length " + std::to_string(b.size()) +
                             ", expected n_L = " + std::to_string(n_l));
        }
        if (b.gamma().size() != h.gamma_dim) {
            issues.push_back("burst " + std::to_string(i) + ": gamma dimension " + std::to_string(b.gamma().size()) +
                             ", expected " + std::to_string(h.gamma_dim));
        }
    }
    if (expected_bursts && *expected_bursts != dataset.size()) {
        issues.push_back("dataset holds " + std::to_string(dataset.size()) + " bursts, expected N_data = " +
                         std::to_string(*expected_bursts));
    }
    return issues;
}

FourierSeries::FourierSeries(double a0, std::vector<double> a, std::vector<double> b)
    : a0_(a0), a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) {
        throw DataError(DataFault::shape, "Fourier cosine and sine coefficient counts differ");
    }
    if (!std::isfinite(a0_) || !all_finite(a_) || !all_finite(b_)) {
        throw DataError(DataFault::non_finite, "Fourier coefficient is not finite");
    }
}

FourierSeries FourierSeries::from_packed(std::span<const double> packed) {
    if (packed.size() % 2 != 1) {
        throw DataError(DataFault::shape, "packed Fourier coefficients must have odd length 2N+1");
    }
    const std::size_t n = packed.size() / 2;
    return FourierSeries(packed[0], std::vector<double>(packed.begin() + 1, packed.begin() + 1 + n),
                         std::vector<double>(packed.begin() + 1 + n, packed.end()));
}

std::vector<double> FourierSeries::packed() const {
    std::vector<double> out;
    out.reserve(coefficient_count());
    out.push_back(a0_);
    out.insert(out.end(), a_.begin(), a_.end());
    out.insert(out.end(), b_.begin(), b_.end());
    return out;
}

} // namespace tdt
