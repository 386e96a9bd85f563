// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// The JSON run configuration: a generation plan at the top level and an
// optional "train" object. Unknown keys are rejected and every problem is
// reported at once.

#pragma once

#include "tdt/fml.hpp"
#include "tdt/model.hpp"
#include "tdt/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace tdt {

struct ModelConfig {
    std::vector<std::size_t> hidden_widths{64, 64};
    OutputMode output = OutputMode::direct;
    std::uint64_t seed = 0;
};

struct RunConfig {
    GenerationPlan plan;
    TrainConfig train;
    ModelConfig model;
};

/// Applies "key=value" overrides (dotted keys reach into "train"). Values are
/// parsed as JSON, falling back to plain strings. Unknown keys are errors.
void apply_overrides(nlohmann::json& doc, const std::vector<std::string>& overrides);

/// Throws ConfigError listing every schema violation.
RunConfig parse_run_config(const nlohmann::json& doc);

nlohmann::json read_json_file(const std::string& path);

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

} // namespace tdt
