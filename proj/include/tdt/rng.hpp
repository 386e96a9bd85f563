// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded random streams. Every consumer derives its own stream from the root
// seed plus a (purpose, index) pair, so results do not depend on the order in
// which parallel workers draw.

#pragma once

#include <cstdint>
#include <random>

namespace tdt {

enum class Stream : std::uint64_t {
    sim_inputs = 1,
    burst_windows = 2,
    weight_init = 3,
    epoch_shuffle = 4,
    holdout = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `purpose`, element `index`, under `root`.
std::uint64_t derive_seed(std::uint64_t root, Stream purpose, std::uint64_t index) noexcept;

/// mt19937_64 plus the two draws the toolkit needs. The draws are written out
/// here rather than taken from <random> distributions, whose output is
/// implementation-defined; artifacts must be byte-identical across builds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t root, Stream purpose, std::uint64_t index) : engine_(derive_seed(root, purpose, index)) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
    double uniform(double lo, double hi);
    /// Uniform integer in [0, bound), bound > 0, unbiased.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

} // namespace tdt
