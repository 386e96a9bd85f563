// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand implementations behind tdt_cli. Each returns a process exit
// code and reports failures by throwing tdt::Error subclasses.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tdt::cli {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool dry_run = false;
    int workers = 0;
    std::string out = ".";
    std::vector<std::string> overrides;
};

struct GenerateOptions {
    /// Trajectory indices to also write as CSV.
    std::vector<std::size_t> export_csv;
};

struct TrainOptions {
    std::string data;
};

struct PredictOptions {
    std::string model;
    std::string window;
    std::size_t horizon = 0;
    std::vector<double> gamma;
    std::string output;
};

struct EvaluateOptions {
    std::string pred;
    std::string ref;
    bool fourier = false;
    std::string output;
};

struct SpectrumOptions {
    std::string input;
    std::vector<std::string> columns;
    std::size_t top = 4;
    std::string output;
};

struct ValidateOptions {
    std::string data;
    std::string model;
    std::string trajectories;
};

int cmd_generate(const GlobalOptions& g, const GenerateOptions& o);
int cmd_train(const GlobalOptions& g, const TrainOptions& o);
int cmd_predict(const GlobalOptions& g, const PredictOptions& o);
int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o);
int cmd_spectrum(const GlobalOptions& g, const SpectrumOptions& o);
int cmd_validate(const GlobalOptions& g, const ValidateOptions& o);

/// 1234567 -> "1,234,567".
std::string grouped(std::uint64_t n);

} // namespace tdt::cli
