// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy. Every failure the toolkit reports falls into one of
// three families, which the CLI maps onto its exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace tdt {

enum class ErrorKind { config, data, divergence };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Distinguishes the ways a data file or in-memory data set can be rejected.
enum class DataFault {
    io,
    magic_mismatch,
    version_mismatch,
    truncated,
    size_mismatch,
    dimension_mismatch,
    format,
    non_finite,
    shape,
};

const char* to_string(DataFault fault) noexcept;

class DataError : public Error {
public:
    DataError(DataFault fault, const std::string& what)
        : Error(ErrorKind::data, std::string(to_string(fault)) + ": " + what), fault_(fault) {}
    DataFault fault() const noexcept { return fault_; }

private:
    DataFault fault_;
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& what) : Error(ErrorKind::divergence, what) {}
};

/// CLI exit codes: 0 success, 2 config, 3 data, 4 numerical divergence.
inline int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::divergence: return 4;
    }
    return 1;
}

} // namespace tdt
