// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Little-endian primitives for the binary file formats, independent of host
// byte order.

#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <string_view>

namespace tdt::io {

class LeWriter {
public:
    explicit LeWriter(const std::string& path);

    void bytes(std::string_view raw);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void f64s(std::span<const double> values);
    /// Flushes and throws DataError(io) if any write failed.
    void close();

private:
    std::string path_;
    std::ofstream out_;
};

/// Reads from an in-memory copy of a file; every read past the end throws
/// DataError(truncated).
class LeReader {
public:
    explicit LeReader(const std::string& path);

    std::size_t size() const noexcept { return data_.size(); }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::size_t position() const noexcept { return pos_; }

    std::string bytes(std::size_t n);
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    void f64s(std::span<double> out);

private:
    void need(std::size_t n, const char* what) const;

    std::string path_;
    std::string data_;
    std::size_t pos_ = 0;
};

} // namespace tdt::io
