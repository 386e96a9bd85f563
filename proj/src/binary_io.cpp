// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/binary_io.hpp"

#include "tdt/error.hpp"

#include <bit>
#include <iterator>

namespace tdt::io {

LeWriter::LeWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
        throw DataError(DataFault::io, "cannot open '" + path + "' for writing");
    }
}

void LeWriter::bytes(std::string_view raw) {
    out_.write(raw.data(), static_cast<std::streamsize>(raw.size()));
}

void LeWriter::u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b, 4);
}

void LeWriter::u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out_.write(b, 8);
}

void LeWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void LeWriter::f64s(std::span<const double> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out_.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    } else {
        for (double v : values) f64(v);
    }
}

void LeWriter::close() {
    out_.flush();
    if (!out_) {
        throw DataError(DataFault::io, "write to '" + path_ + "' failed");
    }
    out_.close();
}

LeReader::LeReader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataFault::io, "cannot open '" + path + "' for reading");
    }
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void LeReader::need(std::size_t n, const char* what) const {
    if (remaining() < n) {
        throw DataError(DataFault::truncated, "'" + path_ + "' ends inside " + what + " at byte " +
                                                  std::to_string(pos_));
    }
}

std::string LeReader::bytes(std::size_t n) {
    need(n, "a byte field");
    std::string out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint32_t LeReader::u32() {
    need(4, "a u32 field");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t LeReader::u64() {
    need(8, "a u64 field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
}

double LeReader::f64() { return std::bit_cast<double>(u64()); }

void LeReader::f64s(std::span<double> out) {
    need(out.size_bytes(), "an f64 block");
    if constexpr (std::endian::native == std::endian::little) {
        std::copy_n(data_.data() + pos_, out.size_bytes(), reinterpret_cast<char*>(out.data()));
        pos_ += out.size_bytes();
    } else {
        for (double& v : out) v = f64();
    }
}

} // namespace tdt::io
