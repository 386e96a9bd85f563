// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/csv.hpp"
#include "tdt/fml.hpp"
#include "tdt/pipeline.hpp"
#include "tdt/predict.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>

using namespace tdt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "tdt_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Run cli(const std::string& args, const fs::path& dir) {
    const auto log = dir / "cli.log";
    const std::string cmd = std::string(TDT_CLI_PATH) + " " + args + " > '" + log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.output = slurp(log);
    fs::remove(log);
    return r;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const auto p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

json minimal_config() {
    return json{{"system", "stuart_landau"},
                {"N_sim", 2},
                {"N_step", 61},
                {"n_M", 49},
                {"n_R", 10},
                {"n_B", 3},
                {"dt", 0.1},
                {"inner_dt", 0.01},
                {"seed", 7},
                {"train", {{"hidden_widths", {8}}, {"epochs", 2}, {"batch_size", 4}}}};
}

json small_config() {
    return json{{"system", "stuart_landau"},
                {"N_sim", 6},
                {"N_step", 60},
                {"n_M", 4},
                {"n_R", 3},
                {"n_B", 5},
                {"dt", 0.1},
                {"inner_dt", 0.01},
                {"seed", 3},
                {"train", {{"hidden_widths", {8}}, {"epochs", 3}, {"batch_size", 8}}}};
}

void write_rows(const fs::path& p, std::size_t n, double dt, std::size_t n_v) {
    Series s;
    s.names = n_v == 2 ? std::vector<std::string>{"x", "y"} : std::vector<std::string>{"x"};
    for (std::size_t i = 0; i < n; ++i) {
        s.t.push_back(static_cast<double>(i) * dt);
        std::vector<double> v;
        for (std::size_t c = 0; c < n_v; ++c) v.push_back(std::sin(0.3 * static_cast<double>(i) + c));
        s.rows.emplace_back(v);
    }
    write_series_csv(p.string(), s);
}

} // namespace

TEST_CASE("paper-shape dry run reports counts and computes nothing") {
    const auto dir = fresh_dir("dry");
    json doc = minimal_config();
    doc["N_sim"] = 7800;
    doc["N_step"] = 2000;
    doc["n_B"] = 10;
    const auto cfg = write_config(dir, doc);
    const auto r = cli("--config " + cfg.string() + " --out " + (dir / "o").string() + " --dry-run generate", dir);
    CHECK(r.code == 0);
    CHECK(r.output.find("N_data=78,000") != std::string::npos);
    CHECK(r.output.find("N_sim=7,800") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o"));

    doc["train"] = {{"hidden_widths", {50, 50, 50, 50, 50}}, {"epochs", 3000}, {"batch_size", 64}};
    const auto cfg2 = write_config(dir, doc);
    const auto t = cli("train --dry-run --config " + cfg2.string() + " --out " + (dir / "o").string(), dir);
    CHECK(t.code == 0);
    CHECK(t.output.find("3,657,000 iterations") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "o"));
}

TEST_CASE("minimal generation writes two trajectories and 2 n_B bursts") {
    const auto dir = fresh_dir("minimal");
    const auto cfg = write_config(dir, minimal_config());
    const auto r = cli("generate --config " + cfg.string() + " --out " + dir.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(load_trajectories((dir / "trajectories.fmlt").string()).size() == 2);
    const auto ds = load_dataset((dir / "dataset.fmld").string());
    CHECK(ds.size() == 6);
    CHECK(validate_dataset(ds, 6).empty());
}

TEST_CASE("generation output matches the library and is byte-identical across runs") {
    const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
    const auto cfg = write_config(a, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + a.string() + " --workers 1", a).code == 0);
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + b.string() + " --workers 3", b).code == 0);
    CHECK(slurp(a / "dataset.fmld") == slurp(b / "dataset.fmld"));
    CHECK(slurp(a / "trajectories.fmlt") == slurp(b / "trajectories.fmlt"));

    GenerationPlan plan;
    plan.spec = FullDtSpec::defaults(SystemId::stuart_landau);
    plan.n_sim = 6;
    plan.n_step = 60;
    plan.memory_depth = 4;
    plan.recurrent_steps = 3;
    plan.bursts_per_trajectory = 5;
    plan.seed = 3;
    const auto lib = extract_bursts(generate_trajectories(plan, 1), 4, 3, 5, 3, 1);
    const auto path = (a / "lib.fmld").string();
    save_dataset(lib, path);
    CHECK(slurp(path) == slurp(a / "dataset.fmld"));
}

TEST_CASE("seed flag and overrides change the output") {
    const auto a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
    const auto cfg = write_config(a, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + a.string(), a).code == 0);
    REQUIRE(cli("generate --seed 4 --config " + cfg.string() + " --out " + b.string(), b).code == 0);
    CHECK(slurp(a / "dataset.fmld") != slurp(b / "dataset.fmld"));
    const auto bad = cli("generate --set N_sims=3 --config " + cfg.string() + " --out " + b.string(), b);
    CHECK(bad.code == 2);
    CHECK(bad.output.find("N_sims") != std::string::npos);
}

TEST_CASE("schema violations exit 2 and are listed together") {
    const auto dir = fresh_dir("schema");
    json doc = small_config();
    doc["extra"] = true;
    doc.erase("n_B");
    const auto cfg = write_config(dir, doc);
    const auto r = cli("generate --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(r.code == 2);
    CHECK(r.output.find("extra") != std::string::npos);
    CHECK(r.output.find("n_B") != std::string::npos);
    CHECK(cli("frobnicate", dir).code == 2);
    CHECK(cli("generate", dir).code == 2);
}

TEST_CASE("train with zero epochs writes the initial model and an empty loss table") {
    const auto dir = fresh_dir("epochs0");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    const auto r = cli("train --set train.epochs=0 --config " + cfg.string() + " --out " + dir.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "loss.csv") == "epoch,loss,lr\n");
    const auto m = load_model((dir / "model.fmlm").string());
    const auto fresh = init_model(2, 0, 4, {8}, 3);
    CHECK(std::equal(m.parameters().begin(), m.parameters().end(), fresh.parameters().begin()));
}

TEST_CASE("train writes one loss row per epoch") {
    const auto dir = fresh_dir("train");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    REQUIRE(cli("train --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    const auto text = slurp(dir / "loss.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("corrupt or mismatched datasets exit 3 with the loader message") {
    const auto dir = fresh_dir("corrupt");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    auto bytes = slurp(dir / "dataset.fmld");
    bytes[0] = 'X';
    std::ofstream(dir / "bad.fmld", std::ios::binary) << bytes;
    const auto r = cli("train --data " + (dir / "bad.fmld").string() + " --config " + cfg.string() + " --out " +
                           dir.string(),
                       dir);
    CHECK(r.code == 3);
    CHECK(r.output.find("not a dataset file (expected magic FMLD)") != std::string::npos);

    const auto m = cli("train --set n_M=5 --config " + cfg.string() + " --out " + dir.string(), dir);
    CHECK(m.code == 3);
    CHECK(m.output.find("n_M") != std::string::npos);
}

TEST_CASE("runaway learning rate exits 4") {
    const auto dir = fresh_dir("diverge");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    const auto r = cli("train --set train.lr_base=1e300 --set train.lr_max=1e300 --set train.epochs=50 --config " +
                           cfg.string() + " --out " + dir.string(),
                       dir);
    CHECK(r.code == 4);
    CHECK(r.output.find("epoch") != std::string::npos);
}

TEST_CASE("predict continues the window clock and rejects short windows") {
    const auto dir = fresh_dir("predict");
    save_model(init_model(2, 0, 49, {8}, 1), (dir / "m.fmlm").string());
    auto m = load_model((dir / "m.fmlm").string());
    m.set_dt(0.1);
    save_model(m, (dir / "m.fmlm").string());

    write_rows(dir / "w49.csv", 49, 0.1, 2);
    const auto bad = cli("predict --model " + (dir / "m.fmlm").string() + " --window " + (dir / "w49.csv").string() +
                             " --horizon 5 --out " + dir.string(),
                         dir);
    CHECK(bad.code == 3);
    CHECK(bad.output.find("50 rows required") != std::string::npos);

    write_rows(dir / "w50.csv", 50, 0.1, 2);
    const auto ok = cli("predict --model " + (dir / "m.fmlm").string() + " --window " + (dir / "w50.csv").string() +
                            " --horizon 1950 --out " + dir.string(),
                        dir);
    REQUIRE(ok.code == 0);
    const auto s = read_series_csv((dir / "prediction.csv").string());
    REQUIRE(s.t.size() == 1950);
    CHECK(s.t.front() == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(s.t.back() == doctest::Approx(199.9).epsilon(1e-12));
    CHECK(s.names == std::vector<std::string>{"x", "y"});
    const auto w = read_series_csv((dir / "w50.csv").string());
    CHECK(s.rows == predict_qoi(m, w.rows, {}, 1950));
}

TEST_CASE("evaluate reports zero, offset and surface errors") {
    const auto dir = fresh_dir("evaluate");
    write_rows(dir / "a.csv", 64, 0.1, 2);
    auto same = cli("evaluate --pred " + (dir / "a.csv").string() + " --ref " + (dir / "a.csv").string() + " --out " +
                        dir.string(),
                    dir);
    REQUIRE(same.code == 0);
    auto doc = json::parse(slurp(dir / "metrics.json"));
    CHECK(doc["components"]["x"]["rms"] == 0.0);
    CHECK(doc["components"]["y"]["max_abs"] == 0.0);
    CHECK(doc["components"]["x"]["pred_peaks"] == doc["components"]["x"]["ref_peaks"]);

    auto s = read_series_csv((dir / "a.csv").string());
    for (auto& r : s.rows) r = QoiVector({r[0], r[1] + 0.1});
    write_series_csv((dir / "b.csv").string(), s);
    REQUIRE(cli("evaluate --pred " + (dir / "b.csv").string() + " --ref " + (dir / "a.csv").string() + " --out " +
                    dir.string(),
                dir)
                .code == 0);
    doc = json::parse(slurp(dir / "metrics.json"));
    CHECK(doc["components"]["x"]["rms"].get<double>() == 0.0);
    CHECK(doc["components"]["y"]["rms"].get<double>() == doctest::Approx(0.1).epsilon(1e-12));

    Series shifted = s;
    for (auto& t : shifted.t) t += 0.05;
    write_series_csv((dir / "c.csv").string(), shifted);
    CHECK(cli("evaluate --pred " + (dir / "c.csv").string() + " --ref " + (dir / "a.csv").string(), dir).code == 3);

    // Fourier-coefficient rows, N = 4, delta in b_3
    Series fp, fr;
    const double delta = 0.05;
    for (std::size_t i = 0; i < 3; ++i) {
        fp.t.push_back(0.1 * static_cast<double>(i));
        std::vector<double> c(9);
        for (std::size_t k = 0; k < 9; ++k) c[k] = std::cos(static_cast<double>(i + k));
        fr.rows.emplace_back(c);
        c[4 + 3] += delta;
        fp.rows.emplace_back(c);
    }
    fr.t = fp.t;
    fp.names = fr.names = default_names(9);
    write_series_csv((dir / "fp.csv").string(), fp);
    write_series_csv((dir / "fr.csv").string(), fr);
    REQUIRE(cli("evaluate --fourier --pred " + (dir / "fp.csv").string() + " --ref " + (dir / "fr.csv").string() +
                    " --out " + dir.string(),
                dir)
                .code == 0);
    doc = json::parse(slurp(dir / "metrics.json"));
    CHECK(doc["surface_l2"]["max"].get<double>() == doctest::Approx(std::sqrt(std::numbers::pi) * delta).epsilon(1e-9));
}

TEST_CASE("spectrum subcommand ranks the tone") {
    const auto dir = fresh_dir("spectrum");
    Series s;
    s.names = {"cl"};
    for (std::size_t i = 0; i < 2048; ++i) {
        s.t.push_back(0.1 * static_cast<double>(i));
        s.rows.emplace_back(std::vector<double>{std::sin(2 * std::numbers::pi * 0.2 * s.t.back())});
    }
    write_series_csv((dir / "s.csv").string(), s);
    REQUIRE(cli("spectrum --input " + (dir / "s.csv").string() + " --out " + dir.string(), dir).code == 0);
    const auto doc = json::parse(slurp(dir / "spectrum.json"));
    CHECK(std::abs(doc["peaks"]["cl"][0]["frequency"].get<double>() - 0.2) <= doc["bin_width"].get<double>());
}

TEST_CASE("validate checks headers and writes nothing") {
    const auto dir = fresh_dir("validate");
    const auto cfg = write_config(dir, small_config());
    REQUIRE(cli("generate --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    REQUIRE(cli("train --config " + cfg.string() + " --out " + dir.string(), dir).code == 0);
    std::vector<std::pair<std::string, fs::file_time_type>> before;
    for (const auto& e : fs::directory_iterator(dir)) before.emplace_back(e.path().string(), e.last_write_time());
    const auto r = cli("validate --config " + cfg.string() + " --data " + (dir / "dataset.fmld").string() + " --model " +
                           (dir / "model.fmlm").string() + " --trajectories " + (dir / "trajectories.fmlt").string() +
                           " --out " + (dir / "nowhere").string(),
                       dir);
    CHECK(r.code == 0);
    std::vector<std::pair<std::string, fs::file_time_type>> after;
    for (const auto& e : fs::directory_iterator(dir)) after.emplace_back(e.path().string(), e.last_write_time());
    std::sort(before.begin(), before.end());
    std::sort(after.begin(), after.end());
    CHECK(before == after);

    const auto mismatch = cli("validate --set n_M=6 --config " + cfg.string() + " --data " +
                                  (dir / "dataset.fmld").string(),
                              dir);
    CHECK(mismatch.code == 3);
    auto bytes = slurp(dir / "model.fmlm");
    bytes[0] = 'X';
    std::ofstream(dir / "bad.fmlm", std::ios::binary) << bytes;
    CHECK(cli("validate --model " + (dir / "bad.fmlm").string(), dir).code == 3);
}
