// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Training-data machinery: sample simulator inputs, run the full DT many
// times, cut random bursts out of the recorded QoI series, and persist the
// results.
//
// All randomness is derived from one root seed per (purpose, index), so the
// parallel paths produce exactly the serial output.

#pragma once

#include "tdt/core.hpp"
#include "tdt/rng.hpp"
#include "tdt/sims.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <span>
#include <string>
#include <vector>

namespace tdt {

struct GenerationPlan {
    FullDtSpec spec;
    std::size_t n_sim = 1;
    std::size_t n_step = 1;
    std::size_t memory_depth = 0;
    std::size_t recurrent_steps = 1;
    std::size_t bursts_per_trajectory = 1;
    std::uint64_t seed = 0;

    std::size_t burst_length() const { return tdt::burst_length(memory_depth, recurrent_steps); }
    /// Valid burst start positions per trajectory, N_step + 1 - n_L + 1.
    std::size_t window_count() const;
    /// N_data = n_B * N_sim.
    std::size_t n_data() const noexcept { return bursts_per_trajectory * n_sim; }

    std::vector<std::string> problems() const;
    void validate() const;
};

/// Inputs of run `index`; depends only on (plan, index).
SimRun sample_input(const GenerationPlan& plan, std::size_t index);
std::vector<SimRun> sample_inputs(const GenerationPlan& plan);

/// Called with trajectories in plan order.
using TrajectorySink = std::function<void(std::size_t index, Trajectory&& trajectory)>;

/// Runs the plan with up to `workers` OpenMP threads (0 = runtime default),
/// `block` runs at a time, handing each block to `sink` in order. Memory use is
/// bounded by one block.
void generate_trajectories(const GenerationPlan& plan, const TrajectorySink& sink, int workers = 0,
                           std::size_t block = 256);
std::vector<Trajectory> generate_trajectories(const GenerationPlan& plan, int workers = 0);

/// n_B distinct start indices drawn uniformly from [0, window_count), sorted.
std::vector<std::size_t> sample_window_starts(std::size_t window_count, std::size_t n_b, Rng& rng);

/// Bursts of trajectory `index`; depends only on (trajectory, index, seed).
std::vector<Burst> bursts_from(const Trajectory& trajectory, std::size_t index, std::size_t burst_len,
                               std::size_t n_b, std::uint64_t seed);

BurstDataset extract_bursts(std::span<const Trajectory> trajectories, std::size_t memory_depth,
                            std::size_t recurrent_steps, std::size_t n_b, std::uint64_t seed, int workers = 0);

// Dataset file: "FMLD", u32 version, u32 n_V, n_gamma, n_M, n_R, u64 N_data,
// f64 dt, then N_data records of n_L*n_V QoI values and n_gamma gamma values.
inline constexpr std::uint32_t dataset_format_version = 1;
inline constexpr std::size_t dataset_header_bytes = 40;

/// Expected file size for a dataset header, in bytes.
std::uint64_t dataset_file_size(const DatasetHeader& header, std::uint64_t n_data);

class DatasetWriter {
public:
    DatasetWriter(const std::string& path, const DatasetHeader& header, std::uint64_t n_data);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void append(const Burst& burst);
    /// Throws DataError if fewer or more than n_data bursts were appended.
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void save_dataset(const BurstDataset& dataset, const std::string& path);
BurstDataset load_dataset(const std::string& path);
/// Reads and checks only the fixed header; returns (header, N_data).
std::pair<DatasetHeader, std::uint64_t> read_dataset_header(const std::string& path);

// Trajectory file: "FMLT", u32 version, u32 n_V, n_gamma, u64 N_traj, f64 dt,
// then per trajectory u64 entry count, entries*n_V QoI values, n_gamma values.
inline constexpr std::uint32_t trajectory_format_version = 1;

class TrajectoryWriter {
public:
    TrajectoryWriter(const std::string& path, std::uint32_t qoi_dim, std::uint32_t gamma_dim, std::uint64_t count,
                     double dt);
    ~TrajectoryWriter();
    TrajectoryWriter(const TrajectoryWriter&) = delete;
    TrajectoryWriter& operator=(const TrajectoryWriter&) = delete;

    void append(const Trajectory& trajectory);
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

void save_trajectories(std::span<const Trajectory> trajectories, const std::string& path);
std::vector<Trajectory> load_trajectories(const std::string& path);

} // namespace tdt
