// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"
#include "tdt/error.hpp"
#include "tdt/fml.hpp"
#include "tdt/pipeline.hpp"

#include <doctest.h>

#include <cmath>

using namespace tdt;

namespace {

DatasetHeader header(std::uint32_t n_v, std::uint32_t n_m, std::uint32_t n_r) {
    DatasetHeader h;
    h.qoi_dim = n_v;
    h.memory_depth = n_m;
    h.recurrent_steps = n_r;
    h.dt = 0.1;
    return h;
}

BurstDataset sl_dataset(std::size_t n_sim, std::size_t n_m, std::size_t n_r, std::uint64_t seed) {
    GenerationPlan p;
    p.spec = FullDtSpec::defaults(SystemId::stuart_landau);
    p.n_sim = n_sim;
    p.n_step = 80;
    p.memory_depth = n_m;
    p.recurrent_steps = n_r;
    p.bursts_per_trajectory = 8;
    p.seed = seed;
    return extract_bursts(generate_trajectories(p, 1), n_m, n_r, 8, seed, 1);
}

TrainConfig quick(std::size_t epochs, std::size_t n_r) {
    TrainConfig c;
    c.recurrent_steps = n_r;
    c.batch_size = 16;
    c.epochs = epochs;
    c.lr_base = 1e-4;
    c.lr_max = 3e-3;
    c.lr_decay = 1.0;
    c.lr_half_cycle = 20;
    c.seed = 5;
    return c;
}

BurstDataset scaled(const BurstDataset& d, std::vector<double> k) {
    std::vector<Burst> out;
    for (const auto& b : d.bursts()) {
        std::vector<double> flat(b.flat().begin(), b.flat().end());
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] *= k[i % k.size()];
        out.emplace_back(b.qoi_dim(), std::move(flat), b.gamma());
    }
    return BurstDataset(d.header(), std::move(out));
}

} // namespace

TEST_CASE("normalization statistics") {
    std::vector<Burst> b;
    b.emplace_back(2, std::vector<double>{1, 10, 3, 10}, ExplicitParams{});
    b.emplace_back(2, std::vector<double>{5, 10, 7, 10}, ExplicitParams{});
    const auto n = fit_normalization(BurstDataset(header(2, 0, 1), std::move(b)));
    CHECK(n.mean == std::vector<double>{4, 10});
    CHECK(n.scale[0] == doctest::Approx(std::sqrt(5.0)));
    CHECK(n.scale[1] == 1.0);
}

TEST_CASE("constant data trains to zero loss with monotone epoch means") {
    std::vector<Burst> b;
    for (int i = 0; i < 64; ++i) b.emplace_back(2, std::vector<double>(2 * 8, 0.75), ExplicitParams{});
    const BurstDataset d(header(2, 4, 3), std::move(b));
    const auto r = train(init_model(2, 0, 4, {16}, 1), d, quick(200, 3));
    REQUIRE(r.epoch_losses.size() == 200);
    for (std::size_t e = 11; e < r.epoch_losses.size(); ++e) CHECK(r.epoch_losses[e] <= r.epoch_losses[e - 1]);
    CHECK(r.epoch_losses.back() < 1e-8);
}

TEST_CASE("per-burst constants are learned as fixed points") {
    std::vector<Burst> b;
    for (int i = 0; i < 64; ++i) b.emplace_back(1, std::vector<double>(6, -1.0 + i / 32.0), ExplicitParams{});
    const BurstDataset d(header(1, 2, 3), std::move(b));
    const auto r = train(init_model(1, 0, 2, {16}, 2), d, quick(200, 3));
    CHECK(r.epoch_losses.back() < 0.02 * r.epoch_losses.front());
}

TEST_CASE("epochs = 0 fits normalization only") {
    const auto d = sl_dataset(4, 3, 2, 1);
    const auto m0 = init_model(2, 0, 3, {8}, 3);
    const auto r = train(m0, d, quick(0, 2));
    CHECK(r.epoch_losses.empty());
    CHECK(std::equal(r.model.parameters().begin(), r.model.parameters().end(), m0.parameters().begin()));
    CHECK(r.model.normalization() == fit_normalization(d));
    CHECK(r.model.dt() == 0.1);
}

TEST_CASE("training is deterministic and reduces the loss") {
    const auto d = sl_dataset(20, 5, 3, 9);
    const auto a = train(init_model(2, 0, 5, {16, 16}, 4), d, quick(30, 3));
    const auto b = train(init_model(2, 0, 5, {16, 16}, 4), d, quick(30, 3));
    CHECK(a.epoch_losses == b.epoch_losses);
    CHECK(a.model == b.model);
    CHECK(a.epoch_losses.back() < 0.2 * a.epoch_losses.front());
}

TEST_CASE("worker count does not change training") {
    const auto d = sl_dataset(10, 4, 2, 3);
    auto c1 = quick(5, 2), c4 = quick(5, 2);
    c1.kernel.workers = 1;
    c4.kernel.workers = 4;
    CHECK(train(init_model(2, 0, 4, {12}, 1), d, c1).model == train(init_model(2, 0, 4, {12}, 1), d, c4).model);
}

TEST_CASE("rescaling the data leaves the normalized computation unchanged") {
    const auto d = sl_dataset(8, 4, 2, 2);
    const std::vector<double> k{3.0, 0.25};
    auto cfg = quick(1, 2);
    cfg.lr_base = cfg.lr_max = 1e-3;
    const auto a = train(init_model(2, 0, 4, {12}, 1), d, cfg).model;
    const auto b = train(init_model(2, 0, 4, {12}, 1), scaled(d, k), cfg).model;
    const auto& burst = d.bursts()[3];
    std::vector<QoiVector> wa, wb;
    for (std::size_t t = 0; t < 5; ++t) {
        wa.emplace_back(std::vector<double>(burst.entry(t).begin(), burst.entry(t).end()));
        wb.emplace_back(std::vector<double>{burst.entry(t)[0] * k[0], burst.entry(t)[1] * k[1]});
    }
    const auto pa = rollout(a, wa, {}, 20), pb = rollout(b, wb, {}, 20);
    for (std::size_t s = 0; s < pa.size(); ++s) {
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(pb[s][i] == doctest::Approx(pa[s][i] * k[i]).epsilon(1e-6));
        }
    }
}

TEST_CASE("paper-shape plan is accepted without compute") {
    const auto m = init_model(2, 0, 49, {50, 50, 50, 50, 50}, 1);
    TrainConfig cfg;
    cfg.batch_size = 64;
    cfg.epochs = 3000;
    const auto plan = plan_training(m, header(2, 49, 10), 78000, cfg);
    CHECK(plan.batches_per_epoch == 1219);
    CHECK(plan.total_iterations == 3657000);
}

TEST_CASE("mismatched dataset and model dimensions") {
    const auto m = init_model(2, 0, 49, {8}, 1);
    TrainConfig cfg;
    try {
        plan_training(m, header(1, 48, 5), 10, cfg);
        FAIL("expected dimension mismatch");
    } catch (const DataError& e) {
        CHECK(e.fault() == DataFault::dimension_mismatch);
        const std::string what = e.what();
        CHECK(what.find("n_V") != std::string::npos);
        CHECK(what.find("n_M") != std::string::npos);
        CHECK(what.find("n_R") != std::string::npos);
    }
}

TEST_CASE("invalid training config lists every problem") {
    TrainConfig c;
    c.batch_size = 0;
    c.lr_base = 1.0;
    c.lr_decay = 2.0;
    c.adam.beta1 = 1.0;
    CHECK(c.problems().size() == 4);
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("a runaway learning rate aborts with context") {
    const auto d = sl_dataset(4, 3, 2, 1);
    auto cfg = quick(50, 2);
    cfg.lr_base = cfg.lr_max = 1e300;
    try {
        train(init_model(2, 0, 3, {8}, 1), d, cfg);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        const std::string what = e.what();
        CHECK(what.find("epoch") != std::string::npos);
        CHECK(what.find("batch") != std::string::npos);
        CHECK(what.find("lr") != std::string::npos);
    }
}

TEST_CASE("epoch callback sees every epoch") {
    const auto d = sl_dataset(4, 3, 2, 1);
    std::vector<EpochReport> seen;
    const auto r = train(init_model(2, 0, 3, {8}, 1), d, quick(7, 2), [&](const EpochReport& e) { seen.push_back(e); });
    REQUIRE(seen.size() == 7);
    for (std::size_t e = 0; e < 7; ++e) {
        CHECK(seen[e].epoch == e);
        CHECK(seen[e].mean_loss == r.epoch_losses[e]);
    }
}
