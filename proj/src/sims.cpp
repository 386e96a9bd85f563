// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/sims.hpp"

#include "tdt/error.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace tdt {

namespace {

constexpr std::size_t max_state = 3;
using State = std::array<double, max_state>;

// dA/dt = (sigma + i omega) A - (1 + i c)|A|^2 A with A = x + i y.
void rhs_stuart_landau(const double* p, const State& s, State& ds) {
    const double sigma = p[0], omega = p[1], c = p[2];
    const double x = s[0], y = s[1];
    const double r2 = x * x + y * y;
    ds[0] = sigma * x - omega * y - r2 * (x - c * y);
    ds[1] = sigma * y + omega * x - r2 * (y + c * x);
}

// x'' - mu (1 - x^2) x' + x = 0
void rhs_van_der_pol(const double* p, const State& s, State& ds) {
    const double mu = p[0];
    ds[0] = s[1];
    ds[1] = mu * (1.0 - s[0] * s[0]) * s[1] - s[0];
}

void rhs_lorenz63(const double* p, const State& s, State& ds) {
    const double sigma = p[0], rho = p[1], beta = p[2];
    ds[0] = sigma * (s[1] - s[0]);
    ds[1] = s[0] * (rho - s[2]) - s[1];
    ds[2] = s[0] * s[1] - beta * s[2];
}

using Rhs = void (*)(const double*, const State&, State&);

Rhs rhs_for(SystemId id) {
    switch (id) {
    case SystemId::stuart_landau: return rhs_stuart_landau;
    case SystemId::van_der_pol: return rhs_van_der_pol;
    case SystemId::lorenz63: return rhs_lorenz63;
    }
    throw ConfigError("unknown system");
}

void rk4(Rhs f, const double* p, std::size_t n, State& s, double h) {
    State k1{}, k2{}, k3{}, k4{}, tmp{};
    f(p, s, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
    f(p, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
    f(p, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
    f(p, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool finite_state(const State& s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s[i])) return false;
    }
    return true;
}

// Stuart-Landau observes the full state; the other two observe x only.
void extract_qoi(SystemId id, const State& s, std::vector<double>& out) {
    switch (id) {
    case SystemId::stuart_landau:
        out.push_back(s[0]);
        out.push_back(s[1]);
        return;
    case SystemId::van_der_pol:
    case SystemId::lorenz63:
        out.push_back(s[0]);
        return;
    }
}

} // namespace

std::string_view to_string(SystemId id) noexcept {
    switch (id) {
    case SystemId::stuart_landau: return "stuart_landau";
    case SystemId::van_der_pol: return "van_der_pol";
    case SystemId::lorenz63: return "lorenz63";
    }
    return "unknown";
}

SystemId system_from_string(std::string_view name) {
    if (name == "stuart_landau") return SystemId::stuart_landau;
    if (name == "van_der_pol") return SystemId::van_der_pol;
    if (name == "lorenz63") return SystemId::lorenz63;
    throw ConfigError("unknown system '" + std::string(name) + "' (expected stuart_landau, van_der_pol or lorenz63)");
}

std::vector<std::string> parameter_names(SystemId id) {
    switch (id) {
    case SystemId::stuart_landau: return {"sigma", "omega", "c"};
    case SystemId::van_der_pol: return {"mu"};
    case SystemId::lorenz63: return {"sigma", "rho", "beta"};
    }
    return {};
}

std::size_t state_dimension(SystemId id) noexcept {
    return id == SystemId::lorenz63 ? 3 : 2;
}

std::size_t qoi_dimension(SystemId id) noexcept {
    return id == SystemId::stuart_landau ? 2 : 1;
}

std::size_t FullDtSpec::gamma_dim() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params) n += p.is_explicit ? 1 : 0;
    return n;
}

std::vector<std::string> FullDtSpec::problems() const {
    std::vector<std::string> out;
    const auto names = parameter_names(system);
    if (params.size() != names.size()) {
        out.push_back("system " + std::string(to_string(system)) + " takes " + std::to_string(names.size()) +
                      " parameters, got " + std::to_string(params.size()));
    } else {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (params[i].name != names[i]) {
                out.push_back("parameter " + std::to_string(i) + " should be '" + names[i] + "', got '" +
                              params[i].name + "'");
            }
        }
    }
    for (const auto& p : params) {
        if (!std::isfinite(p.range.lo) || !std::isfinite(p.range.hi) || p.range.lo > p.range.hi) {
            out.push_back("parameter '" + p.name + "' has an empty or non-finite range");
        }
    }
    if (init_state.size() != state_dim()) {
        out.push_back("initial-state box has " + std::to_string(init_state.size()) + " intervals, system state has " +
                      std::to_string(state_dim()));
    }
    for (std::size_t i = 0; i < init_state.size(); ++i) {
        const auto& r = init_state[i];
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
            out.push_back("initial-state interval " + std::to_string(i) + " is empty or non-finite");
        }
    }
    if (!(std::isfinite(inner_dt) && inner_dt > 0.0)) {
        out.push_back("inner_dt must be finite and positive");
    }
    if (record_every < 1) {
        out.push_back("record_every must be at least 1");
    }
    return out;
}

void FullDtSpec::validate() const {
    const auto issues = problems();
    if (!issues.empty()) {
        std::string msg = "invalid simulator spec:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

FullDtSpec FullDtSpec::defaults(SystemId id) {
    FullDtSpec spec;
    spec.system = id;
    spec.inner_dt = 0.01;
    spec.record_every = 10;
    switch (id) {
    case SystemId::stuart_landau:
        spec.params = {{"sigma", {0.5, 1.5}, false},
                       {"omega", {2.0 * std::numbers::pi * 0.15, 2.0 * std::numbers::pi * 0.25}, false},
                       {"c", {0.0, 0.0}, false}};
        spec.init_state = {{-0.4, 0.4}, {-0.4, 0.4}};
        break;
    case SystemId::van_der_pol:
        spec.params = {{"mu", {0.5, 2.0}, false}};
        spec.init_state = {{-0.5, 0.5}, {-0.5, 0.5}};
        break;
    case SystemId::lorenz63:
        spec.params = {{"sigma", {9.0, 11.0}, false}, {"rho", {26.0, 30.0}, false}, {"beta", {2.5, 2.8}, false}};
        spec.init_state = {{-1.0, 1.0}, {-1.0, 1.0}, {0.0, 2.0}};
        spec.inner_dt = 0.005;
        spec.record_every = 4;
        break;
    }
    return spec;
}

void SimRun::validate() const {
    spec.validate();
    if (params.size() != spec.params.size()) {
        throw ConfigError("run carries " + std::to_string(params.size()) + " parameters, system takes " +
                          std::to_string(spec.params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!spec.params[i].range.contains(params[i])) {
            throw ConfigError("parameter '" + spec.params[i].name + "' outside its range");
        }
    }
    if (initial_state.size() != spec.state_dim()) {
        throw ConfigError("initial state has wrong dimension");
    }
    for (std::size_t i = 0; i < initial_state.size(); ++i) {
        if (!spec.init_state[i].contains(initial_state[i])) {
            throw ConfigError("initial state component " + std::to_string(i) + " outside its range");
        }
    }
    if (n_step < 1) {
        throw ConfigError("n_step must be at least 1");
    }
}

std::vector<double> rk4_step(SystemId id, std::span<const double> params, std::span<const double> state, double dt) {
    const std::size_t n = state_dimension(id);
    if (state.size() != n) {
        throw ConfigError("state dimension " + std::to_string(state.size()) + " does not match system " +
                          std::string(to_string(id)));
    }
    if (params.size() != parameter_names(id).size()) {
        throw ConfigError("wrong parameter count for system " + std::string(to_string(id)));
    }
    if (!(dt > 0.0)) {
        throw ConfigError("integrator step must be positive");
    }
    State s{};
    std::copy(state.begin(), state.end(), s.begin());
    rk4(rhs_for(id), params.data(), n, s, dt);
    if (!finite_state(s, n)) {
        throw DivergenceError("integration blow-up: non-finite state after one RK4 step");
    }
    return {s.begin(), s.begin() + static_cast<std::ptrdiff_t>(n)};
}

Trajectory run_full_dt(const SimRun& run) {
    run.validate();
    const SystemId id = run.spec.system;
    const std::size_t n = run.spec.state_dim();
    const Rhs f = rhs_for(id);
    const double h = run.spec.inner_dt;
    const std::uint32_t k = run.spec.record_every;

    State s{};
    std::copy(run.initial_state.begin(), run.initial_state.end(), s.begin());

    std::size_t inner = 0;
    auto advance = [&] {
        for (std::uint32_t i = 0; i < k; ++i) {
            rk4(f, run.params.data(), n, s, h);
            ++inner;
        }
        if (!finite_state(s, n)) {
            throw DivergenceError("integration blow-up at inner step " + std::to_string(inner));
        }
    };

    for (std::uint32_t i = 0; i < run.spec.burn_in; ++i) advance();

    const std::size_t n_v = run.spec.qoi_dim();
    std::vector<double> flat;
    flat.reserve((run.n_step + 1) * n_v);
    extract_qoi(id, s, flat);
    for (std::size_t step = 0; step < run.n_step; ++step) {
        advance();
        extract_qoi(id, s, flat);
    }
    if (flat.size() != (run.n_step + 1) * n_v) {
        throw ConfigError("QoI extractor produced the wrong dimension");
    }

    std::vector<double> gamma;
    for (std::size_t i = 0; i < run.params.size(); ++i) {
        if (run.spec.params[i].is_explicit) gamma.push_back(run.params[i]);
    }
    return Trajectory(run.spec.dt(), n_v, std::move(flat), ExplicitParams(std::move(gamma)));
}

} // namespace tdt
