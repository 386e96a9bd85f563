// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Time-indexed series as CSV: a header row "t,<name>,..." and one row per
// step. Numbers are written in shortest round-trip form.

#pragma once

#include "tdt/core.hpp"

#include <string>
#include <vector>

namespace tdt {

struct Series {
    std::vector<std::string> names;
    std::vector<double> t;
    std::vector<QoiVector> rows;
};

void write_series_csv(const std::string& path, const Series& series);
/// Throws DataError on ragged rows, bad numbers or a missing "t" column.
Series read_series_csv(const std::string& path);

/// Component names v0..v{n-1}.
std::vector<std::string> default_names(std::size_t n);

std::string format_double(double v);

} // namespace tdt
