// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0
//
// tdt_cli: generate -> train -> predict -> evaluate, plus spectrum and
// validate. Exit codes: 0 ok, 2 configuration, 3 data, 4 divergence.

#include "commands.hpp"

#include "tdt/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace tdt::cli;

    CLI::App app{"Flow-map digital twin toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "JSON run configuration");
    auto* seed_opt = app.add_option("--seed", seed, "override the configuration seed");
    app.add_flag("--dry-run", g.dry_run, "validate and report without computing or writing");
    app.add_option("--workers", g.workers, "worker threads, 0 = all available")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--set", g.overrides, "configuration override key=value (repeatable)");

    GenerateOptions gen;
    auto* c_gen = app.add_subcommand("generate", "run the full DT and cut the burst dataset");
    c_gen->add_option("--export-csv", gen.export_csv, "also write these trajectories as CSV")->delimiter(',');

    TrainOptions tr;
    auto* c_train = app.add_subcommand("train", "fit the flow map to a dataset");
    c_train->add_option("--data", tr.data, "dataset file (default OUT/dataset.fmld)");

    PredictOptions pr;
    auto* c_pred = app.add_subcommand("predict", "roll a trained model forward from an initial window");
    c_pred->add_option("--model", pr.model, "model file")->required();
    c_pred->add_option("--window", pr.window, "CSV with exactly n_M + 1 rows")->required();
    c_pred->add_option("--horizon", pr.horizon, "steps to predict")->required();
    c_pred->add_option("--gamma", pr.gamma, "explicit parameter values")->delimiter(',');
    c_pred->add_option("--output", pr.output, "prediction CSV (default OUT/prediction.csv)");

    EvaluateOptions ev;
    auto* c_eval = app.add_subcommand("evaluate", "compare a prediction with a reference series");
    c_eval->add_option("--pred", ev.pred, "prediction CSV")->required();
    c_eval->add_option("--ref", ev.ref, "reference CSV")->required();
    c_eval->add_flag("--fourier", ev.fourier, "rows are packed Fourier coefficients (a0, a1..aN, b1..bN)");
    c_eval->add_option("--output", ev.output, "metrics JSON (default OUT/metrics.json)");

    SpectrumOptions sp;
    auto* c_spec = app.add_subcommand("spectrum", "ranked spectral peaks of CSV columns");
    c_spec->add_option("--input", sp.input, "series CSV")->required();
    c_spec->add_option("--column", sp.columns, "columns to analyse (default all)");
    c_spec->add_option("--top", sp.top, "peaks to report");
    c_spec->add_option("--output", sp.output, "spectrum JSON (default OUT/spectrum.json)");

    ValidateOptions va;
    auto* c_val = app.add_subcommand("validate", "check configuration and file headers; writes nothing");
    c_val->add_option("--data", va.data, "dataset file");
    c_val->add_option("--model", va.model, "model file");
    c_val->add_option("--trajectories", va.trajectories, "trajectory file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tdt::exit_code(tdt::ErrorKind::config);
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (c_gen->parsed()) return cmd_generate(g, gen);
        if (c_train->parsed()) return cmd_train(g, tr);
        if (c_pred->parsed()) return cmd_predict(g, pr);
        if (c_eval->parsed()) return cmd_evaluate(g, ev);
        if (c_spec->parsed()) return cmd_spectrum(g, sp);
        if (c_val->parsed()) return cmd_validate(g, va);
    } catch (const tdt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tdt::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
