// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include "tdt/config.hpp"
#include "tdt/csv.hpp"
#include "tdt/error.hpp"
#include "tdt/fml.hpp"
#include "tdt/pipeline.hpp"
#include "tdt/predict.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

namespace tdt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string grouped(std::uint64_t n) {
    std::string digits = std::to_string(n), out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return out;
}

namespace {

RunConfig run_config(const GlobalOptions& g) {
    if (g.config.empty()) {
        throw ConfigError("this subcommand needs --config PATH");
    }
    auto overrides = g.overrides;
    if (g.seed) overrides.push_back("seed=" + std::to_string(*g.seed));
    RunConfig cfg = load_run_config(g.config, overrides);
    cfg.train.kernel.workers = g.workers;
    return cfg;
}

std::string in_out(const GlobalOptions& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

void ensure_out(const GlobalOptions& g) {
    std::error_code ec;
    fs::create_directories(g.out, ec);
    if (ec) {
        throw DataError(DataFault::io, "cannot create output directory '" + g.out + "': " + ec.message());
    }
}

DatasetHeader header_for(const GenerationPlan& plan) {
    DatasetHeader h;
    h.qoi_dim = static_cast<std::uint32_t>(plan.spec.qoi_dim());
    h.gamma_dim = static_cast<std::uint32_t>(plan.spec.gamma_dim());
    h.memory_depth = static_cast<std::uint32_t>(plan.memory_depth);
    h.recurrent_steps = static_cast<std::uint32_t>(plan.recurrent_steps);
    h.dt = plan.spec.dt();
    return h;
}

std::vector<std::string> qoi_names(SystemId id) {
    if (id == SystemId::stuart_landau) return {"x", "y"};
    return {"x"};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << text;
    if (!out) {
        throw DataError(DataFault::io, "cannot write '" + path + "'");
    }
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

double uniform_step(const Series& s, const std::string& what) {
    if (s.t.size() < 2) {
        throw DataError(DataFault::shape, what + " needs at least two rows to infer its time step");
    }
    const double dt = (s.t.back() - s.t.front()) / static_cast<double>(s.t.size() - 1);
    for (std::size_t i = 1; i < s.t.size(); ++i) {
        if (std::abs(s.t[i] - s.t[i - 1] - dt) > 1e-6 * dt) {
            throw DataError(DataFault::shape, what + " is not uniformly sampled near row " + std::to_string(i));
        }
    }
    return dt;
}

json peaks_json(const SpectrumResult& s, std::size_t top) {
    json arr = json::array();
    for (std::size_t i = 0; i < std::min(top, s.ranked_peaks.size()); ++i) {
        arr.push_back({{"frequency", s.ranked_peaks[i].frequency}, {"amplitude", s.ranked_peaks[i].amplitude}});
    }
    return arr;
}

std::vector<double> column(const Series& s, std::size_t i) {
    std::vector<double> out;
    out.reserve(s.rows.size());
    for (const auto& r : s.rows) out.push_back(r[i]);
    return out;
}

} // namespace

int cmd_generate(const GlobalOptions& g, const GenerateOptions& o) {
    const RunConfig cfg = run_config(g);
    const GenerationPlan& plan = cfg.plan;
    std::cout << "system " << to_string(plan.spec.system) << ", dt " << plan.spec.dt() << "\n"
              << "N_sim=" << grouped(plan.n_sim) << " N_step=" << grouped(plan.n_step)
              << " n_L=" << plan.burst_length() << " n_B=" << plan.bursts_per_trajectory
              << " N_data=" << grouped(plan.n_data()) << "\n";
    for (std::size_t j : o.export_csv) {
        if (j >= plan.n_sim) {
            throw ConfigError("--export-csv index " + std::to_string(j) + " is outside 0.." +
                              std::to_string(plan.n_sim - 1));
        }
    }
    if (g.dry_run) return 0;

    ensure_out(g);
    const std::set<std::size_t> exports(o.export_csv.begin(), o.export_csv.end());
    const auto h = header_for(plan);
    TrajectoryWriter traj(in_out(g, "trajectories.fmlt"), h.qoi_dim, h.gamma_dim, plan.n_sim, h.dt);
    DatasetWriter data(in_out(g, "dataset.fmld"), h, plan.n_data());
    generate_trajectories(
        plan,
        [&](std::size_t j, Trajectory&& t) {
            traj.append(t);
            for (const auto& b : bursts_from(t, j, plan.burst_length(), plan.bursts_per_trajectory, plan.seed)) {
                data.append(b);
            }
            if (exports.contains(j)) {
                Series s;
                s.names = qoi_names(plan.spec.system);
                for (std::size_t i = 0; i < t.size(); ++i) {
                    s.t.push_back(static_cast<double>(i) * t.dt());
                    s.rows.emplace_back(std::vector<double>(t.entry(i).begin(), t.entry(i).end()));
                }
                write_series_csv(in_out(g, "trajectory_" + std::to_string(j) + ".csv"), s);
            }
        },
        g.workers);
    traj.finish();
    data.finish();
    std::cout << "wrote " << in_out(g, "trajectories.fmlt") << " and " << in_out(g, "dataset.fmld") << "\n";
    return 0;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o) {
    const RunConfig cfg = run_config(g);
    const std::string data_path = o.data.empty() ? in_out(g, "dataset.fmld") : o.data;
    auto model = init_model(cfg.plan.spec.qoi_dim(), cfg.plan.spec.gamma_dim(), cfg.plan.memory_depth,
                            cfg.model.hidden_widths, cfg.model.seed, cfg.model.output);

    DatasetHeader header = header_for(cfg.plan);
    std::uint64_t n_data = cfg.plan.n_data();
    if (!g.dry_run || fs::exists(data_path)) {
        std::tie(header, n_data) = read_dataset_header(data_path);
    }
    const TrainingPlan tp = plan_training(model, header, n_data, cfg.train);
    std::cout << "model widths";
    for (std::size_t w : model.widths()) std::cout << ' ' << w;
    std::cout << " (" << grouped(model.parameters().size()) << " parameters)\n"
              << "N_data=" << grouped(n_data) << " batch " << cfg.train.batch_size << ", "
              << grouped(tp.batches_per_epoch) << " batches/epoch, " << grouped(cfg.train.epochs) << " epochs, "
              << grouped(tp.total_iterations) << " iterations\n";
    if (g.dry_run) return 0;

    const BurstDataset dataset = load_dataset(data_path);
    ensure_out(g);
    const std::string loss_path = in_out(g, "loss.csv");
    std::ofstream loss(loss_path, std::ios::trunc);
    if (!loss) {
        throw DataError(DataFault::io, "cannot write '" + loss_path + "'");
    }
    loss << "epoch,loss,lr\n";
    const std::size_t every = std::max<std::size_t>(1, cfg.train.epochs / 10);
    const TrainResult r = train(std::move(model), dataset, cfg.train, [&](const EpochReport& e) {
        loss << e.epoch << ',' << format_double(e.mean_loss) << ',' << format_double(e.lr) << '\n';
        loss.flush();
        if ((e.epoch + 1) % every == 0 || e.epoch + 1 == cfg.train.epochs) {
            std::cout << "epoch " << e.epoch + 1 << "/" << cfg.train.epochs << " loss " << e.mean_loss << "\n";
        }
    });
    save_model(r.model, in_out(g, "model.fmlm"));
    std::cout << "wrote " << in_out(g, "model.fmlm") << " and " << loss_path << "\n";
    return 0;
}

int cmd_predict(const GlobalOptions& g, const PredictOptions& o) {
    const FlowMapModel model = load_model(o.model);
    const Series window = read_series_csv(o.window);
    const std::size_t need = model.window_length();
    if (window.rows.size() != need) {
        throw DataError(DataFault::shape, "window '" + o.window + "' has " + std::to_string(window.rows.size()) +
                                              " rows; " + std::to_string(need) + " rows required (n_M + 1 with n_M = " +
                                              std::to_string(model.memory_depth()) + ")");
    }
    if (window.names.size() != model.qoi_dim()) {
        throw DataError(DataFault::dimension_mismatch, "window has " + std::to_string(window.names.size()) +
                                                           " QoI columns, model expects " +
                                                           std::to_string(model.qoi_dim()));
    }
    if (o.gamma.size() != model.gamma_dim()) {
        throw ConfigError("model expects " + std::to_string(model.gamma_dim()) + " gamma values, got " +
                          std::to_string(o.gamma.size()));
    }
    if (o.horizon < 1) {
        throw ConfigError("--horizon must be at least 1");
    }
    double dt = model.dt();
    if (!(dt > 0.0)) dt = uniform_step(window, "window");
    if (g.dry_run) {
        std::cout << "would predict " << o.horizon << " steps of dt " << dt << "\n";
        return 0;
    }

    const auto pred = predict_qoi(model, window.rows, ExplicitParams(o.gamma), o.horizon);
    // Rows continue the window's clock on the grid k * dt.
    const auto k_last = std::llround(window.t.back() / dt);
    Series s;
    s.names = window.names;
    s.rows = pred;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        s.t.push_back(static_cast<double>(k_last + 1 + static_cast<long long>(j)) * dt);
    }
    const std::string path = o.output.empty() ? in_out(g, "prediction.csv") : o.output;
    if (o.output.empty()) ensure_out(g);
    write_series_csv(path, s);
    std::cout << "wrote " << pred.size() << " rows, t = " << s.t.front() << " .. " << s.t.back() << " to " << path
              << "\n";
    return 0;
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateOptions& o) {
    const Series pred = read_series_csv(o.pred);
    Series ref = read_series_csv(o.ref);
    if (pred.rows.empty()) {
        throw DataError(DataFault::shape, "prediction '" + o.pred + "' has no rows");
    }
    if (pred.names.size() != ref.names.size()) {
        throw DataError(DataFault::dimension_mismatch, "prediction has " + std::to_string(pred.names.size()) +
                                                           " components, reference " +
                                                           std::to_string(ref.names.size()));
    }
    // A longer reference is cut to the prediction's time span.
    std::size_t offset = 0;
    while (offset < ref.t.size() && !same_time(ref.t[offset], pred.t.front())) ++offset;
    if (offset + pred.t.size() > ref.t.size()) {
        throw DataError(DataFault::shape, "reference does not cover the prediction's time column starting at t = " +
                                              format_double(pred.t.front()));
    }
    for (std::size_t i = 0; i < pred.t.size(); ++i) {
        if (!same_time(pred.t[i], ref.t[offset + i])) {
            throw DataError(DataFault::shape, "time columns are misaligned at prediction row " + std::to_string(i) +
                                                  " (t = " + format_double(pred.t[i]) + " vs " +
                                                  format_double(ref.t[offset + i]) + ")");
        }
    }
    const std::span<const QoiVector> r(ref.rows.data() + offset, pred.rows.size());
    const auto rms = rms_error(pred.rows, r);
    const auto pw = pointwise_error(pred.rows, r);

    json doc;
    doc["steps"] = pred.rows.size();
    doc["t_start"] = pred.t.front();
    doc["t_end"] = pred.t.back();
    json comps = json::object();
    const bool spectral = pred.rows.size() >= 16;
    const double dt = spectral ? uniform_step(pred, "prediction") : 0.0;
    for (std::size_t i = 0; i < pred.names.size(); ++i) {
        double worst = 0.0;
        for (const auto& row : pw) worst = std::max(worst, row[i]);
        json c{{"rms", rms[i]}, {"max_abs", worst}};
        if (spectral) {
            std::vector<double> rc;
            for (const auto& row : r) rc.push_back(row[i]);
            c["pred_peaks"] = peaks_json(spectrum(column(pred, i), dt), 4);
            c["ref_peaks"] = peaks_json(spectrum(rc, dt), 4);
        }
        comps[pred.names[i]] = c;
    }
    doc["components"] = comps;
    try {
        doc["relative_rms"] = relative_rms_error(pred.rows, r, pred.rows.size());
    } catch (const DataError&) {
        doc["relative_rms"] = nullptr;
    }
    if (o.fourier) {
        std::vector<double> e2;
        for (std::size_t t = 0; t < pred.rows.size(); ++t) {
            e2.push_back(l2_surface_error(FourierSeries::from_packed(pred.rows[t].values()),
                                          FourierSeries::from_packed(r[t].values())));
        }
        double sum = 0.0;
        for (double v : e2) sum += v;
        doc["surface_l2"] = {{"mean", sum / static_cast<double>(e2.size())},
                             {"max", *std::max_element(e2.begin(), e2.end())},
                             {"series", e2}};
    }
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!g.dry_run) {
        const std::string path = o.output.empty() ? in_out(g, "metrics.json") : o.output;
        if (o.output.empty()) ensure_out(g);
        write_text(path, text);
    }
    return 0;
}

int cmd_spectrum(const GlobalOptions& g, const SpectrumOptions& o) {
    const Series s = read_series_csv(o.input);
    const double dt = uniform_step(s, "'" + o.input + "'");
    std::vector<std::size_t> picks;
    if (o.columns.empty()) {
        for (std::size_t i = 0; i < s.names.size(); ++i) picks.push_back(i);
    }
    for (const auto& name : o.columns) {
        const auto it = std::find(s.names.begin(), s.names.end(), name);
        if (it == s.names.end()) {
            throw ConfigError("no column '" + name + "' in '" + o.input + "'");
        }
        picks.push_back(static_cast<std::size_t>(it - s.names.begin()));
    }
    json doc{{"dt", dt}, {"samples", s.rows.size()}};
    json cols = json::object();
    for (std::size_t i : picks) {
        const auto sp = spectrum(column(s, i), dt);
        doc["bin_width"] = sp.bin_width;
        cols[s.names[i]] = peaks_json(sp, o.top);
    }
    doc["peaks"] = cols;
    const std::string text = doc.dump(2) + "\n";
    std::cout << text;
    if (!g.dry_run) {
        const std::string path = o.output.empty() ? in_out(g, "spectrum.json") : o.output;
        if (o.output.empty()) ensure_out(g);
        write_text(path, text);
    }
    return 0;
}

int cmd_validate(const GlobalOptions& g, const ValidateOptions& o) {
    if (g.config.empty() && o.data.empty() && o.model.empty() && o.trajectories.empty()) {
        throw ConfigError("nothing to validate; pass --config, --data, --model or --trajectories");
    }
    std::optional<RunConfig> cfg;
    if (!g.config.empty()) {
        cfg = run_config(g);
        std::cout << "config ok: " << to_string(cfg->plan.spec.system) << ", N_data=" << grouped(cfg->plan.n_data())
                  << "\n";
    }
    std::vector<std::string> issues;
    if (!o.data.empty()) {
        const auto [h, n] = read_dataset_header(o.data);
        std::cout << "dataset ok: n_V=" << h.qoi_dim << " n_gamma=" << h.gamma_dim << " n_M=" << h.memory_depth
                  << " n_R=" << h.recurrent_steps << " N_data=" << grouped(n) << "\n";
        if (cfg) {
            const DatasetHeader want = header_for(cfg->plan);
            if (h.qoi_dim != want.qoi_dim || h.gamma_dim != want.gamma_dim || h.memory_depth != want.memory_depth ||
                h.recurrent_steps != want.recurrent_steps || std::abs(h.dt - want.dt) > 1e-12 * want.dt) {
                issues.push_back("dataset header disagrees with the configuration");
            }
        }
    }
    if (!o.model.empty()) {
        const FlowMapModel m = load_model(o.model);
        std::cout << "model ok: n_V=" << m.qoi_dim() << " n_gamma=" << m.gamma_dim() << " n_M=" << m.memory_depth()
                  << " parameters=" << grouped(m.parameters().size()) << "\n";
        if (cfg && (m.qoi_dim() != cfg->plan.spec.qoi_dim() || m.gamma_dim() != cfg->plan.spec.gamma_dim() ||
                    m.memory_depth() != cfg->plan.memory_depth)) {
            issues.push_back("model dimensions disagree with the configuration");
        }
    }
    if (!o.trajectories.empty()) {
        const auto t = load_trajectories(o.trajectories);
        std::cout << "trajectories ok: " << grouped(t.size()) << " runs\n";
    }
    if (!issues.empty()) {
        std::string msg;
        for (const auto& s : issues) msg += (msg.empty() ? "" : "; ") + s;
        throw DataError(DataFault::dimension_mismatch, msg);
    }
    return 0;
}

} // namespace tdt::cli
