// Copyright (c) 2026, The tdt Authors
// SPDX-License-Identifier: Apache-2.0

#include "tdt/pipeline.hpp"

#include "tdt/binary_io.hpp"
#include "tdt/error.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <optional>
#include <sstream>

namespace tdt {

std::size_t GenerationPlan::window_count() const {
    const std::size_t len = n_step + 1;
    const std::size_t n_l = burst_length();
    return len >= n_l ? len - n_l + 1 : 0;
}

std::vector<std::string> GenerationPlan::problems() const {
    std::vector<std::string> out = spec.problems();
    if (n_sim < 1) out.push_back("N_sim must be at least 1");
    if (recurrent_steps < 1) out.push_back("n_R must be at least 1");
    if (bursts_per_trajectory < 1) out.push_back("n_B must be at least 1");
    if (n_step < memory_depth + 2) {
        out.push_back("N_step = " + std::to_string(n_step) + " is below n_M + 2 = " + std::to_string(memory_depth + 2));
    }
    if (recurrent_steps >= 1) {
        const std::size_t n_l = burst_length();
        if (n_step + 1 < n_l) {
            out.push_back("trajectories of N_step + 1 = " + std::to_string(n_step + 1) +
                          " entries hold no burst of length n_L = " + std::to_string(n_l));
        } else if (bursts_per_trajectory > window_count()) {
            out.push_back("n_B = " + std::to_string(bursts_per_trajectory) + " exceeds the " +
                          std::to_string(window_count()) + " burst windows per trajectory");
        }
    }
    return out;
}

void GenerationPlan::validate() const {
    const auto issues = problems();
    if (!issues.empty()) {
        std::string msg = "invalid generation plan:";
        for (const auto& s : issues) msg += "\n  - " + s;
        throw ConfigError(msg);
    }
}

SimRun sample_input(const GenerationPlan& plan, std::size_t index) {
    Rng rng(plan.seed, Stream::sim_inputs, index);
    SimRun run;
    run.spec = plan.spec;
    run.n_step = plan.n_step;
    run.params.reserve(plan.spec.params.size());
    for (const auto& p : plan.spec.params) {
        if (!(p.range.lo <= p.range.hi)) {
            throw ConfigError("parameter '" + p.name + "' has an empty range");
        }
        run.params.push_back(rng.uniform(p.range.lo, p.range.hi));
    }
    run.initial_state.reserve(plan.spec.init_state.size());
    for (const auto& r : plan.spec.init_state) {
        if (!(r.lo <= r.hi)) {
            throw ConfigError("initial-state range is empty");
        }
        run.initial_state.push_back(rng.uniform(r.lo, r.hi));
    }
    return run;
}

std::vector<SimRun> sample_inputs(const GenerationPlan& plan) {
    plan.validate();
    std::vector<SimRun> runs;
    runs.reserve(plan.n_sim);
    for (std::size_t j = 0; j < plan.n_sim; ++j) runs.push_back(sample_input(plan, j));
    return runs;
}

namespace {

std::string describe_run(std::size_t index, const SimRun& run) {
    std::ostringstream os;
    os.precision(17);
    os << "run " << index << " (params:";
    for (std::size_t i = 0; i < run.params.size(); ++i) os << ' ' << run.spec.params[i].name << '=' << run.params[i];
    os << "; initial state:";
    for (double v : run.initial_state) os << ' ' << v;
    os << ')';
    return os.str();
}

int thread_count(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

} // namespace

void generate_trajectories(const GenerationPlan& plan, const TrajectorySink& sink, int workers, std::size_t block) {
    plan.validate();
    block = std::max<std::size_t>(block, 1);
    const int threads = thread_count(workers);
    for (std::size_t first = 0; first < plan.n_sim; first += block) {
        const std::size_t count = std::min(block, plan.n_sim - first);
        std::vector<std::optional<Trajectory>> slots(count);
        std::vector<std::exception_ptr> errors(count);
        const auto n = static_cast<std::ptrdiff_t>(count);

#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const std::size_t j = first + static_cast<std::size_t>(i);
            try {
                slots[i].emplace(run_full_dt(sample_input(plan, j)));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }

        for (std::size_t i = 0; i < count; ++i) {
            if (errors[i]) {
                const std::size_t j = first + i;
                try {
                    std::rethrow_exception(errors[i]);
                } catch (const DivergenceError& e) {
                    throw DivergenceError(describe_run(j, sample_input(plan, j)) + ": " + e.what());
                }
            }
            sink(first + i, std::move(*slots[i]));
        }
    }
}

std::vector<Trajectory> generate_trajectories(const GenerationPlan& plan, int workers) {
    std::vector<Trajectory> out;
    out.reserve(plan.n_sim);
    generate_trajectories(plan, [&](std::size_t, Trajectory&& t) { out.push_back(std::move(t)); }, workers);
    return out;
}

std::vector<std::size_t> sample_window_starts(std::size_t window_count, std::size_t n_b, Rng& rng) {
    if (n_b > window_count) {
        throw DataError(DataFault::shape, "cannot draw " + std::to_string(n_b) + " distinct windows out of " +
                                              std::to_string(window_count));
    }
    // Floyd's algorithm: n_b draws, each value equally likely, no duplicates.
    std::vector<std::size_t> chosen;
    chosen.reserve(n_b);
    for (std::size_t j = window_count - n_b; j < window_count; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
            chosen.push_back(t);
        } else {
            chosen.push_back(j);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<Burst> bursts_from(const Trajectory& trajectory, std::size_t index, std::size_t burst_len,
                               std::size_t n_b, std::uint64_t seed) {
    const std::size_t len = trajectory.size();
    if (len < burst_len || n_b > len - burst_len + 1) {
        throw DataError(DataFault::shape, "trajectory " + std::to_string(index) + " has " + std::to_string(len) +
                                              " entries; cannot cut " + std::to_string(n_b) +
                                              " distinct bursts of length " + std::to_string(burst_len));
    }
    Rng rng(seed, Stream::burst_windows, index);
    const auto starts = sample_window_starts(len - burst_len + 1, n_b, rng);
    const std::size_t n_v = trajectory.qoi_dim();
    const auto flat = trajectory.flat();
    std::vector<Burst> out;
    out.reserve(n_b);
    for (std::size_t s : starts) {
        auto first = flat.begin() + static_cast<std::ptrdiff_t>(s * n_v);
        out.emplace_back(n_v, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(burst_len * n_v)),
                         trajectory.gamma());
    }
    return out;
}

BurstDataset extract_bursts(std::span<const Trajectory> trajectories, std::size_t memory_depth,
                            std::size_t recurrent_steps, std::size_t n_b, std::uint64_t seed, int workers) {
    if (trajectories.empty()) {
        throw DataError(DataFault::shape, "no trajectories to cut bursts from");
    }
    const std::size_t n_l = burst_length(memory_depth, recurrent_steps);
    const auto& first = trajectories.front();
    for (std::size_t j = 0; j < trajectories.size(); ++j) {
        if (trajectories[j].qoi_dim() != first.qoi_dim() || trajectories[j].gamma().size() != first.gamma().size()) {
            throw DataError(DataFault::dimension_mismatch, "trajectory " + std::to_string(j) +
                                                               " differs in QoI or gamma dimension from trajectory 0");
        }
    }

    std::vector<std::vector<Burst>> per(trajectories.size());
    std::vector<std::exception_ptr> errors(trajectories.size());
    const auto n = static_cast<std::ptrdiff_t>(trajectories.size());
#pragma omp parallel for schedule(static) num_threads(thread_count(workers))
    for (std::ptrdiff_t j = 0; j < n; ++j) {
        try {
            per[j] = bursts_from(trajectories[j], static_cast<std::size_t>(j), n_l, n_b, seed);
        } catch (...) {
            errors[j] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<Burst> bursts;
    bursts.reserve(n_b * trajectories.size());
    for (auto& v : per) {
        for (auto& b : v) bursts.push_back(std::move(b));
    }
    DatasetHeader header;
    header.qoi_dim = static_cast<std::uint32_t>(first.qoi_dim());
    header.gamma_dim = static_cast<std::uint32_t>(first.gamma().size());
    header.memory_depth = static_cast<std::uint32_t>(memory_depth);
    header.recurrent_steps = static_cast<std::uint32_t>(recurrent_steps);
    header.dt = first.dt();
    return BurstDataset(header, std::move(bursts));
}

// ---------------------------------------------------------------------------
// Dataset files

std::uint64_t dataset_file_size(const DatasetHeader& header, std::uint64_t n_data) {
    const std::uint64_t record = header.burst_length() * header.qoi_dim + header.gamma_dim;
    return dataset_header_bytes + n_data * record * sizeof(double);
}

struct DatasetWriter::Impl {
    io::LeWriter out;
    DatasetHeader header;
    std::uint64_t expected;
    std::uint64_t written = 0;
    bool finished = false;
};

DatasetWriter::DatasetWriter(const std::string& path, const DatasetHeader& header, std::uint64_t n_data)
    : impl_(std::make_unique<Impl>(Impl{io::LeWriter(path), header, n_data})) {
    auto& out = impl_->out;
    out.bytes("FMLD");
    out.u32(dataset_format_version);
    out.u32(header.qoi_dim);
    out.u32(header.gamma_dim);
    out.u32(header.memory_depth);
    out.u32(header.recurrent_steps);
    out.u64(n_data);
    out.f64(header.dt);
}

DatasetWriter::~DatasetWriter() = default;

void DatasetWriter::append(const Burst& burst) {
    const auto& h = impl_->header;
    if (burst.qoi_dim() != h.qoi_dim || burst.size() != h.burst_length() || burst.gamma().size() != h.gamma_dim) {
        throw DataError(DataFault::dimension_mismatch,
                        "burst " + std::to_string(impl_->written) + " does not match the dataset header");
    }
    if (impl_->written == impl_->expected) {
        throw DataError(DataFault::size_mismatch, "more bursts than the declared N_data");
    }
    impl_->out.f64s(burst.flat());
    impl_->out.f64s(burst.gamma().values());
    ++impl_->written;
}

void DatasetWriter::finish() {
    if (impl_->written != impl_->expected) {
        throw DataError(DataFault::size_mismatch, "wrote " + std::to_string(impl_->written) +
                                                      " bursts, header declares " + std::to_string(impl_->expected));
    }
    impl_->out.close();
    impl_->finished = true;
}

void save_dataset(const BurstDataset& dataset, const std::string& path) {
    DatasetWriter w(path, dataset.header(), dataset.size());
    for (const auto& b : dataset.bursts()) w.append(b);
    w.finish();
}

namespace {

DatasetHeader read_header_fields(io::LeReader& in, std::uint64_t& n_data) {
    if (in.size() < 4) {
        throw DataError(DataFault::truncated, "dataset file shorter than its magic");
    }
    if (in.bytes(4) != "FMLD") {
        throw DataError(DataFault::magic_mismatch, "not a dataset file (expected magic FMLD)");
    }
    if (in.size() < dataset_header_bytes) {
        throw DataError(DataFault::truncated, "dataset file shorter than its 40-byte header");
    }
    const std::uint32_t version = in.u32();
    if (version != dataset_format_version) {
        throw DataError(DataFault::version_mismatch, "dataset format version " + std::to_string(version) +
                                                         ", expected " + std::to_string(dataset_format_version));
    }
    DatasetHeader h;
    h.qoi_dim = in.u32();
    h.gamma_dim = in.u32();
    h.memory_depth = in.u32();
    h.recurrent_steps = in.u32();
    n_data = in.u64();
    h.dt = in.f64();
    if (h.qoi_dim == 0 || h.recurrent_steps == 0) {
        throw DataError(DataFault::dimension_mismatch, "dataset header declares n_V = 0 or n_R = 0");
    }
    return h;
}

} // namespace

std::pair<DatasetHeader, std::uint64_t> read_dataset_header(const std::string& path) {
    io::LeReader in(path);
    std::uint64_t n_data = 0;
    const DatasetHeader h = read_header_fields(in, n_data);
    const std::uint64_t expected = dataset_file_size(h, n_data);
    if (in.size() != expected) {
        throw DataError(DataFault::size_mismatch,
                        "header (n_V=" + std::to_string(h.qoi_dim) + ", n_L=" + std::to_string(h.burst_length()) +
                            ", n_gamma=" + std::to_string(h.gamma_dim) + ", N_data=" + std::to_string(n_data) +
                            ") implies " + std::to_string(expected) + " bytes, file has " + std::to_string(in.size()));
    }
    return {h, n_data};
}

BurstDataset load_dataset(const std::string& path) {
    io::LeReader in(path);
    std::uint64_t n_data = 0;
    const DatasetHeader h = read_header_fields(in, n_data);
    const std::uint64_t expected = dataset_file_size(h, n_data);
    if (in.size() != expected) {
        throw DataError(DataFault::size_mismatch,
                        "header (n_V=" + std::to_string(h.qoi_dim) + ", n_L=" + std::to_string(h.burst_length()) +
                            ", n_gamma=" + std::to_string(h.gamma_dim) + ", N_data=" + std::to_string(n_data) +
                            ") implies " + std::to_string(expected) + " bytes, file has " + std::to_string(in.size()));
    }
    const std::size_t n_values = h.burst_length() * h.qoi_dim;
    std::vector<Burst> bursts;
    bursts.reserve(n_data);
    for (std::uint64_t i = 0; i < n_data; ++i) {
        std::vector<double> values(n_values);
        in.f64s(values);
        std::vector<double> gamma(h.gamma_dim);
        in.f64s(gamma);
        bursts.emplace_back(h.qoi_dim, std::move(values), ExplicitParams(std::move(gamma)));
    }
    return BurstDataset(h, std::move(bursts));
}

// ---------------------------------------------------------------------------
// Trajectory files

struct TrajectoryWriter::Impl {
    io::LeWriter out;
    std::uint32_t qoi_dim;
    std::uint32_t gamma_dim;
    std::uint64_t expected;
    double dt;
    std::uint64_t written = 0;
};

TrajectoryWriter::TrajectoryWriter(const std::string& path, std::uint32_t qoi_dim, std::uint32_t gamma_dim,
                                   std::uint64_t count, double dt)
    : impl_(std::make_unique<Impl>(Impl{io::LeWriter(path), qoi_dim, gamma_dim, count, dt})) {
    auto& out = impl_->out;
    out.bytes("FMLT");
    out.u32(trajectory_format_version);
    out.u32(qoi_dim);
    out.u32(gamma_dim);
    out.u64(count);
    out.f64(dt);
}

TrajectoryWriter::~TrajectoryWriter() = default;

void TrajectoryWriter::append(const Trajectory& t) {
    if (t.qoi_dim() != impl_->qoi_dim || t.gamma().size() != impl_->gamma_dim || t.dt() != impl_->dt) {
        throw DataError(DataFault::dimension_mismatch,
                        "trajectory " + std::to_string(impl_->written) + " does not match the file header");
    }
    if (impl_->written == impl_->expected) {
        throw DataError(DataFault::size_mismatch, "more trajectories than the declared count");
    }
    impl_->out.u64(t.size());
    impl_->out.f64s(t.flat());
    impl_->out.f64s(t.gamma().values());
    ++impl_->written;
}

void TrajectoryWriter::finish() {
    if (impl_->written != impl_->expected) {
        throw DataError(DataFault::size_mismatch, "wrote " + std::to_string(impl_->written) +
                                                      " trajectories, header declares " +
                                                      std::to_string(impl_->expected));
    }
    impl_->out.close();
}

void save_trajectories(std::span<const Trajectory> trajectories, const std::string& path) {
    if (trajectories.empty()) {
        throw DataError(DataFault::shape, "no trajectories to save");
    }
    const auto& f = trajectories.front();
    TrajectoryWriter w(path, static_cast<std::uint32_t>(f.qoi_dim()), static_cast<std::uint32_t>(f.gamma().size()),
                       trajectories.size(), f.dt());
    for (const auto& t : trajectories) w.append(t);
    w.finish();
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
    io::LeReader in(path);
    if (in.size() < 4) {
        throw DataError(DataFault::truncated, "trajectory file shorter than its magic");
    }
    if (in.bytes(4) != "FMLT") {
        throw DataError(DataFault::magic_mismatch, "not a trajectory file (expected magic FMLT)");
    }
    const std::uint32_t version = in.u32();
    if (version != trajectory_format_version) {
        throw DataError(DataFault::version_mismatch, "trajectory format version " + std::to_string(version));
    }
    const std::uint32_t n_v = in.u32();
    const std::uint32_t n_g = in.u32();
    const std::uint64_t count = in.u64();
    const double dt = in.f64();
    if (n_v == 0) {
        throw DataError(DataFault::dimension_mismatch, "trajectory header declares n_V = 0");
    }
    std::vector<Trajectory> out;
    for (std::uint64_t j = 0; j < count; ++j) {
        const std::uint64_t entries = in.u64();
        if (entries > in.remaining() / (n_v * sizeof(double))) {
            throw DataError(DataFault::size_mismatch, "trajectory " + std::to_string(j) + " declares " +
                                                          std::to_string(entries) + " entries beyond end of file");
        }
        std::vector<double> flat(entries * n_v);
        in.f64s(flat);
        std::vector<double> gamma(n_g);
        in.f64s(gamma);
        out.emplace_back(dt, n_v, std::move(flat), ExplicitParams(std::move(gamma)));
    }
    if (in.remaining() != 0) {
        throw DataError(DataFault::size_mismatch, std::to_string(in.remaining()) + " trailing bytes after " +
                                                      std::to_string(count) + " trajectories");
    }
    return out;
}

} // namespace tdt
