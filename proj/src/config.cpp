// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/config.hpp"

#include "tdt/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace tdt {

namespace {

using nlohmann::json;

const std::set<std::string> top_keys = {"system", "ranges", "N_sim", "N_step",  "n_M",     "n_R",
                                        "n_B",    "dt",     "inner_dt", "seed", "burn_in", "explicit_params",
                                        "train"};
const std::set<std::string> train_keys = {"hidden_widths", "output",       "epochs",        "batch_size",
                                          "lr_base",       "lr_max",       "lr_decay",      "lr_half_cycle",
                                          "adam_beta1",    "adam_beta2",   "adam_eps",      "seed",
                                          "chunk"};
const std::set<std::string> required = {"system", "N_sim", "N_step", "n_M", "n_R", "n_B", "dt", "inner_dt", "seed"};

class Collector {
public:
    void add(std::string s) { issues_.push_back(std::move(s)); }
    bool empty() const { return issues_.empty(); }
    [[noreturn]] void raise() const {
        std::string msg = "configuration has " + std::to_string(issues_.size()) + " problem(s):";
        for (const auto& s : issues_) msg += "\n  - " + s;
        throw ConfigError(msg);
    }

    template <class T>
    void read(const json& obj, const std::string& key, const std::string& where, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            add("'" + where + key + "' has the wrong type");
        }
    }

    void count(const json& obj, const std::string& key, const std::string& where, std::size_t& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            add("'" + where + key + "' must be a nonnegative integer");
            return;
        }
        out = v.get<std::size_t>();
    }

    void seed(const json& obj, const std::string& key, const std::string& where, std::uint64_t& out) {
        if (!obj.contains(key)) return;
        const auto& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            add("'" + where + key + "' must be an unsigned 64-bit integer");
            return;
        }
        out = v.get<std::uint64_t>();
    }

    Interval interval(const json& v, const std::string& what) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            add(what + " must be a [lo, hi] pair of numbers");
            return {};
        }
        Interval r{v[0].get<double>(), v[1].get<double>()};
        if (!(r.lo <= r.hi)) add(what + " is empty (lo > hi)");
        return r;
    }

private:
    std::vector<std::string> issues_;
};

json parse_value(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception&) {
        return json(text);
    }
}

} // namespace

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
    std::vector<std::string> bad;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos || eq == 0) {
            bad.push_back("override '" + o + "' is not of the form key=value");
            continue;
        }
        const std::string key = o.substr(0, eq);
        const json value = parse_value(o.substr(eq + 1));
        if (key.rfind("train.", 0) == 0) {
            const std::string sub = key.substr(6);
            if (!train_keys.contains(sub)) {
                bad.push_back("override key '" + key + "' is not a configuration key");
                continue;
            }
            doc["train"][sub] = value;
        } else if (top_keys.contains(key) && key != "train") {
            doc[key] = value;
        } else {
            bad.push_back("override key '" + key + "' is not a configuration key");
        }
    }
    if (!bad.empty()) {
        std::string msg = "invalid overrides:";
        for (const auto& s : bad) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

RunConfig parse_run_config(const json& doc) {
    Collector c;
    RunConfig cfg;
    if (!doc.is_object()) {
        c.add("configuration must be a JSON object");
        c.raise();
    }
    for (const auto& [k, v] : doc.items()) {
        if (!top_keys.contains(k)) c.add("unknown key '" + k + "'");
    }
    for (const auto& k : required) {
        if (!doc.contains(k)) c.add("missing required key '" + k + "'");
    }

    SystemId system = SystemId::stuart_landau;
    if (doc.contains("system")) {
        try {
            system = system_from_string(doc.at("system").get<std::string>());
        } catch (const ConfigError& e) {
            c.add(e.what());
        } catch (const json::exception&) {
            c.add("'system' must be a string");
        }
    }
    GenerationPlan& plan = cfg.plan;
    plan.spec = FullDtSpec::defaults(system);

    if (doc.contains("ranges")) {
        const auto& r = doc.at("ranges");
        if (!r.is_object()) {
            c.add("'ranges' must be an object");
        } else {
            for (const auto& [k, v] : r.items()) {
                if (k != "params" && k != "state") c.add("unknown key 'ranges." + k + "'");
            }
            if (r.contains("params")) {
                const auto& p = r.at("params");
                if (!p.is_object()) {
                    c.add("'ranges.params' must be an object");
                } else {
                    for (const auto& [name, v] : p.items()) {
                        auto it = std::find_if(plan.spec.params.begin(), plan.spec.params.end(),
                                               [&](const ParamRange& pr) { return pr.name == name; });
                        if (it == plan.spec.params.end()) {
                            c.add("system " + std::string(to_string(system)) + " has no parameter '" + name + "'");
                        } else {
                            it->range = c.interval(v, "'ranges.params." + name + "'");
                        }
                    }
                }
            }
            if (r.contains("state")) {
                const auto& s = r.at("state");
                if (!s.is_array() || s.size() != plan.spec.state_dim()) {
                    c.add("'ranges.state' must list " + std::to_string(plan.spec.state_dim()) + " intervals");
                } else {
                    for (std::size_t i = 0; i < s.size(); ++i) {
                        plan.spec.init_state[i] = c.interval(s[i], "'ranges.state[" + std::to_string(i) + "]'");
                    }
                }
            }
        }
    }
    if (doc.contains("explicit_params")) {
        std::vector<std::string> names;
        c.read(doc, "explicit_params", "", names);
        for (const auto& name : names) {
            auto it = std::find_if(plan.spec.params.begin(), plan.spec.params.end(),
                                   [&](const ParamRange& pr) { return pr.name == name; });
            if (it == plan.spec.params.end()) {
                c.add("explicit parameter '" + name + "' is not a parameter of " + std::string(to_string(system)));
            } else {
                it->is_explicit = true;
            }
        }
    }

    c.count(doc, "N_sim", "", plan.n_sim);
    c.count(doc, "N_step", "", plan.n_step);
    c.count(doc, "n_M", "", plan.memory_depth);
    c.count(doc, "n_R", "", plan.recurrent_steps);
    c.count(doc, "n_B", "", plan.bursts_per_trajectory);
    c.seed(doc, "seed", "", plan.seed);
    std::size_t burn_in = 0;
    c.count(doc, "burn_in", "", burn_in);
    plan.spec.burn_in = static_cast<std::uint32_t>(burn_in);

    double dt = 0.0, inner_dt = 0.0;
    c.read(doc, "dt", "", dt);
    c.read(doc, "inner_dt", "", inner_dt);
    if (doc.contains("dt") && doc.contains("inner_dt")) {
        if (!(inner_dt > 0.0 && std::isfinite(inner_dt)) || !(dt > 0.0 && std::isfinite(dt))) {
            c.add("'dt' and 'inner_dt' must be finite and positive");
        } else {
            const double ratio = dt / inner_dt;
            const double k = std::round(ratio);
            if (k < 1.0 || std::abs(ratio - k) > 1e-9 * k) {
                c.add("'dt' must be a whole multiple of 'inner_dt' (got ratio " + std::to_string(ratio) + ")");
            } else {
                plan.spec.inner_dt = inner_dt;
                plan.spec.record_every = static_cast<std::uint32_t>(k);
            }
        }
    }

    TrainConfig& tc = cfg.train;
    tc.seed = plan.seed;
    cfg.model.seed = plan.seed;
    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        if (!t.is_object()) {
            c.add("'train' must be an object");
        } else {
            for (const auto& [k, v] : t.items()) {
                if (!train_keys.contains(k)) c.add("unknown key 'train." + k + "'");
            }
            c.read(t, "hidden_widths", "train.", cfg.model.hidden_widths);
            if (t.contains("output")) {
                std::string mode;
                c.read(t, "output", "train.", mode);
                if (mode == "direct") {
                    cfg.model.output = OutputMode::direct;
                } else if (mode == "residual") {
                    cfg.model.output = OutputMode::residual;
                } else {
                    c.add("'train.output' must be \"direct\" or \"residual\"");
                }
            }
            c.count(t, "epochs", "train.", tc.epochs);
            c.count(t, "batch_size", "train.", tc.batch_size);
            c.count(t, "lr_half_cycle", "train.", tc.lr_half_cycle);
            c.count(t, "chunk", "train.", tc.kernel.chunk);
            c.read(t, "lr_base", "train.", tc.lr_base);
            c.read(t, "lr_max", "train.", tc.lr_max);
            c.read(t, "lr_decay", "train.", tc.lr_decay);
            c.read(t, "adam_beta1", "train.", tc.adam.beta1);
            c.read(t, "adam_beta2", "train.", tc.adam.beta2);
            c.read(t, "adam_eps", "train.", tc.adam.eps);
            if (t.contains("seed")) {
                c.seed(t, "seed", "train.", tc.seed);
                cfg.model.seed = tc.seed;
            }
        }
    }
    tc.recurrent_steps = plan.recurrent_steps;
    if (cfg.model.hidden_widths.empty()) c.add("'train.hidden_widths' must not be empty");
    for (std::size_t w : cfg.model.hidden_widths) {
        if (w == 0) c.add("'train.hidden_widths' entries must be positive");
    }

    if (c.empty()) {
        for (auto& s : plan.problems()) c.add(std::move(s));
        for (auto& s : tc.problems()) c.add("train: " + s);
    }
    if (!c.empty()) c.raise();
    return cfg;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration '" + path + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("configuration '" + path + "' is not valid JSON: " + e.what());
    }
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    json doc = read_json_file(path);
    apply_overrides(doc, overrides);
    return parse_run_config(doc);
}

} // namespace tdt
