// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Built-in "full digital twin" simulators: small ODE systems whose parameters
// are sampled per run and, unless flagged explicit, never leave the run. Each
// run is integrated with classical RK4 at an inner step and recorded every
// `record_every` inner steps through the system's QoI extractor.

#pragma once

#include "tdt/core.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdt {

enum class SystemId { stuart_landau, van_der_pol, lorenz63 };

std::string_view to_string(SystemId id) noexcept;
/// Throws ConfigError for unknown names.
SystemId system_from_string(std::string_view name);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const noexcept { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// A system parameter and its sampling box. Explicit parameters are copied
/// into the trajectory's gamma; all others stay hidden.
struct ParamRange {
    std::string name;
    Interval range;
    bool is_explicit = false;
    friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

/// Names of a system's parameters, in the order the right-hand side reads them.
std::vector<std::string> parameter_names(SystemId id);
std::size_t state_dimension(SystemId id) noexcept;
std::size_t qoi_dimension(SystemId id) noexcept;

struct FullDtSpec {
    SystemId system = SystemId::stuart_landau;
    std::vector<ParamRange> params;
    std::vector<Interval> init_state;
    double inner_dt = 0.01;
    std::uint32_t record_every = 10;
    /// Recorded steps integrated and dropped before the first QoI entry.
    std::uint32_t burn_in = 0;

    std::size_t state_dim() const noexcept { return state_dimension(system); }
    std::size_t qoi_dim() const noexcept { return qoi_dimension(system); }
    std::size_t gamma_dim() const noexcept;
    /// QoI recording step, record_every * inner_dt.
    double dt() const noexcept { return inner_dt * record_every; }

    /// Lists every violated invariant; empty when the spec is usable.
    std::vector<std::string> problems() const;
    /// Throws ConfigError carrying all problems.
    void validate() const;

    /// Desk-scale defaults. Initial-state boxes sit inside the attractor so
    /// every run starts with a transient.
    static FullDtSpec defaults(SystemId id);
};

struct SimRun {
    FullDtSpec spec;
    /// All system parameter values, in parameter_names order.
    std::vector<double> params;
    std::vector<double> initial_state;
    std::size_t n_step = 1;

    void validate() const;
};

/// One classical RK4 step of the system's right-hand side.
std::vector<double> rk4_step(SystemId id, std::span<const double> params, std::span<const double> state, double dt);

/// Integrates the run and returns its QoI series (n_step + 1 entries) with
/// gamma set from the explicit parameters. Throws DivergenceError on blow-up.
Trajectory run_full_dt(const SimRun& run);

} // namespace tdt
