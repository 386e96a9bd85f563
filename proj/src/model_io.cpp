// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/binary_io.hpp"
#include "tdt/error.hpp"
#include "tdt/model.hpp"

#include <json.hpp>

namespace tdt {

namespace {

constexpr std::uint32_t model_format_version = 1;
constexpr const char* model_magic = "FMLM";

} // namespace

void save_model(const FlowMapModel& model, const std::string& path) {
    nlohmann::ordered_json h;
    h["version"] = model_format_version;
    h["n_V"] = model.qoi_dim();
    h["n_gamma"] = model.gamma_dim();
    h["n_M"] = model.memory_depth();
    h["layer_widths"] = model.widths();
    h["activation"] = "tanh";
    h["output"] = std::string(to_string(model.output_mode()));
    h["dt"] = model.dt();
    h["normalization"] = {{"mean", model.normalization().mean}, {"std", model.normalization().scale}};
    h["parameter_count"] = model.parameters().size();
    const std::string header = h.dump();

    io::LeWriter out(path);
    out.bytes(model_magic);
    out.u64(header.size());
    out.bytes(header);
    out.f64s(model.parameters());
    out.close();
}

FlowMapModel load_model(const std::string& path) {
    io::LeReader in(path);
    if (in.size() < 4) {
        throw DataError(DataFault::truncated, "model file shorter than its magic");
    }
    if (in.bytes(4) != model_magic) {
        throw DataError(DataFault::magic_mismatch, "not a model file (expected magic FMLM)");
    }
    const std::uint64_t header_len = in.u64();
    if (header_len > in.remaining()) {
        throw DataError(DataFault::truncated, "model header length " + std::to_string(header_len) +
                                                  " exceeds the file");
    }
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(in.bytes(header_len));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(DataFault::format, std::string("model header is not valid JSON: ") + e.what());
    }

    try {
        const auto version = h.at("version").get<std::uint32_t>();
        if (version != model_format_version) {
            throw DataError(DataFault::version_mismatch, "model format version " + std::to_string(version) +
                                                             ", expected " + std::to_string(model_format_version));
        }
        if (h.at("activation").get<std::string>() != "tanh") {
            throw DataError(DataFault::format, "unsupported activation '" + h.at("activation").get<std::string>() + "'");
        }
        const auto out_tag = h.at("output").get<std::string>();
        OutputMode mode;
        if (out_tag == "direct") {
            mode = OutputMode::direct;
        } else if (out_tag == "residual") {
            mode = OutputMode::residual;
        } else {
            throw DataError(DataFault::format, "unknown output mode '" + out_tag + "'");
        }
        const auto n_v = h.at("n_V").get<std::size_t>();
        const auto n_g = h.at("n_gamma").get<std::size_t>();
        const auto n_m = h.at("n_M").get<std::size_t>();
        const auto widths = h.at("layer_widths").get<std::vector<std::size_t>>();
        Normalization norm{h.at("normalization").at("mean").get<std::vector<double>>(),
                           h.at("normalization").at("std").get<std::vector<double>>()};
        const double dt = h.at("dt").get<double>();

        if (widths.size() < 2 || widths.front() != (n_m + 1) * n_v + n_g || widths.back() != n_v) {
            throw DataError(DataFault::dimension_mismatch,
                            "layer widths are inconsistent with n_V, n_gamma and n_M in the model header");
        }
        for (std::size_t w : widths) {
            if (w == 0) throw DataError(DataFault::dimension_mismatch, "zero layer width in the model header");
        }
        const std::size_t count = FlowMapModel::parameter_count(widths);
        if (h.contains("parameter_count") && h.at("parameter_count").get<std::size_t>() != count) {
            throw DataError(DataFault::dimension_mismatch, "declared parameter count disagrees with the layer widths");
        }
        if (in.remaining() != count * sizeof(double)) {
            throw DataError(DataFault::size_mismatch, "weight section holds " + std::to_string(in.remaining()) +
                                                          " bytes, layer widths need " +
                                                          std::to_string(count * sizeof(double)));
        }
        std::vector<double> params(count);
        in.f64s(params);
        return FlowMapModel(n_v, n_g, n_m, widths, std::move(params), std::move(norm), mode, dt);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(DataFault::format, std::string("model header is missing or mistypes a field: ") + e.what());
    }
}

} // namespace tdt
