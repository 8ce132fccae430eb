#include "p2psim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "p2psim/simulation.hpp"

namespace p2psim {

namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t master_seed, const ExperimentCell& cell)
{
    const auto rate_milli = static_cast<std::int64_t>(std::llround(cell.tx_rate * 1000.0));
    if (cell.peers < 0 || cell.peers >= (1 << 16) || rate_milli < 0 || rate_milli >= (1LL << 24) ||
        cell.replication < 0 || cell.replication >= (1 << 20)) {
        throw std::invalid_argument("derive_seed: cell coordinates out of encodable range");
    }
    // Packed coordinates: 2 bits strategy, 16 bits P, 24 bits rate (milli t/min), 20 bits replication.
    const std::uint64_t code = static_cast<std::uint64_t>(cell.strategy) | static_cast<std::uint64_t>(cell.peers) << 2 |
                               static_cast<std::uint64_t>(rate_milli) << 18 |
                               static_cast<std::uint64_t>(cell.replication) << 42;
    // Odd multiplier and mix64 are both bijections on 64-bit words.
    return mix64(master_seed + code * 0x9e3779b97f4a7c15ULL);
}

std::string format_rate(double tx_rate)
{
    std::ostringstream os;
    os << tx_rate;
    return os.str();
}

fs::path cell_path(const ExperimentCell& cell)
{
    return fs::path(std::string(to_string(cell.strategy))) / ("P" + std::to_string(cell.peers)) /
           ("lam" + format_rate(cell.tx_rate)) / ("run" + std::to_string(cell.replication));
}

Config cell_config(const Config& base, const ExperimentCell& cell)
{
    Config c = base;
    c.strategy = cell.strategy;
    c.peer_count = cell.peers;
    c.tx_rate = cell.tx_rate;
    return c;
}

namespace {

void write_config_file(const Config& c, std::uint64_t seed, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : c.to_map()) out << k << " = " << v << '\n';
    out << "# derived run seed\n";
    out << "run_seed = " << seed << '\n';
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_run_csv(const RunOutcome& r, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const RunSummary& s = r.summary;
    out << "strategy,peers,tx_rate,replication,seed,events,generated,confirmed,mempool_residue,losses,arrived,"
           "mean_propagation,mean_confirmation,blocks,fork_count\n";
    out << to_string(r.cell.strategy) << ',' << r.cell.peers << ',' << format_rate(r.cell.tx_rate) << ','
        << r.cell.replication << ',' << r.seed << ',' << r.events << ',' << s.generated << ',' << s.confirmed << ','
        << s.mempool_residue << ',' << s.losses << ',' << s.arrived << ',' << fmt(s.mean_propagation) << ','
        << fmt(s.mean_confirmation) << ',' << s.blocks << ',' << s.fork_count << '\n';
}

}  // namespace

RunOutcome run_cell(const ExperimentCell& cell, const Config& base, const fs::path& out_root, RunOptions options)
{
    const Config config = cell_config(base, cell);
    config.validate();
    const std::uint64_t seed = derive_seed(base.master_seed, cell);

    const fs::path final_dir = out_root / cell_path(cell);
    const fs::path staging = out_root / ".staging" / (cell_path(cell).generic_string() + ".tmp");
    fs::remove_all(staging);
    fs::create_directories(staging);

    std::ofstream trace;
    SimulationOptions sim_options;
    if (options.trace) {
        trace.open(staging / "trace.csv", std::ios::binary);
        if (!trace) throw std::runtime_error("cannot write trace file");
        sim_options.trace = &trace;
    }
    Simulation sim = Simulation::create(config, seed, sim_options);
    sim.run();
    trace.close();

    const RunDatasets data = collect_datasets(sim);
    RunOutcome outcome{cell, seed, summarize(data), sim.events_processed()};
    write_datasets(data, staging);
    write_config_file(config, seed, staging / "config.txt");
    write_run_csv(outcome, staging / "run.csv");
    {
        std::ofstream topo(staging / "topology.csv", std::ios::binary);
        sim.graph().write_edge_csv(topo);
    }

    fs::remove_all(final_dir);
    fs::create_directories(final_dir.parent_path());
    fs::rename(staging, final_dir);
    return outcome;
}

CellSummary aggregate_cell(const std::vector<RunOutcome>& runs)
{
    if (runs.empty()) throw std::invalid_argument("aggregate_cell: no runs");
    CellSummary c;
    c.strategy = runs.front().cell.strategy;
    c.peers = runs.front().cell.peers;
    c.tx_rate = runs.front().cell.tx_rate;
    c.replications = static_cast<int>(runs.size());
    std::vector<double> prop, conf, forks, overlaps, gaps, p95;
    for (const auto& r : runs) {
        const RunSummary& s = r.summary;
        prop.push_back(s.mean_propagation);
        conf.push_back(s.mean_confirmation);
        forks.push_back(static_cast<double>(s.fork_count));
        c.fork_total += s.fork_count;
        overlaps.insert(overlaps.end(), s.overlaps.begin(), s.overlaps.end());
        gaps.insert(gaps.end(), s.fork_gaps.begin(), s.fork_gaps.end());
        p95.insert(p95.end(), s.block_p95.begin(), s.block_p95.end());
        c.generated += s.generated;
        c.confirmed += s.confirmed;
        c.mempool_residue += s.mempool_residue;
        c.losses += s.losses;
    }
    const auto ci = [](const std::vector<double>& v) {
        return v.size() >= 2 ? mean_ci(v) : MeanCi{mean(v), std::nan("")};
    };
    c.propagation = ci(prop);
    c.confirmation = ci(conf);
    c.forks = ci(forks);
    c.overlap_n = overlaps.size();
    c.overlap_mean = mean(overlaps);
    c.overlap_std = sample_stddev(overlaps);
    if (!gaps.empty()) c.fork_gap_median = median(gaps);
    if (!p95.empty()) c.block_p95_median = median(p95);
    return c;
}

namespace {
std::string opt(double v)
{
    return std::isnan(v) ? std::string() : fmt(v);
}
std::string opt(const std::optional<double>& v)
{
    return v ? fmt(*v) : std::string();
}
}  // namespace

void write_summary_csv(const std::vector<CellSummary>& rows, const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << "strategy,peers,tx_rate,replications,propagation_mean,propagation_ci95,confirmation_mean,"
               "confirmation_ci95,fork_count_mean,fork_count_ci95,fork_total,overlap_mean,overlap_std,overlap_n,"
               "fork_gap_median,block_p95_median,generated,confirmed,mempool_residue,losses\n";
        for (const auto& c : rows) {
            out << to_string(c.strategy) << ',' << c.peers << ',' << format_rate(c.tx_rate) << ',' << c.replications
                << ',' << fmt(c.propagation.mean) << ',' << opt(c.propagation.half_width) << ','
                << fmt(c.confirmation.mean) << ',' << opt(c.confirmation.half_width) << ',' << fmt(c.forks.mean) << ','
                << opt(c.forks.half_width) << ',' << c.fork_total << ',' << (c.overlap_n ? fmt(c.overlap_mean) : "")
                << ',' << (c.overlap_n ? fmt(c.overlap_std) : "") << ',' << c.overlap_n << ','
                << opt(c.fork_gap_median) << ',' << opt(c.block_p95_median) << ',' << c.generated << ','
                << c.confirmed << ',' << c.mempool_residue << ',' << c.losses << '\n';
        }
    }
    fs::rename(tmp, path);
}

std::vector<CellSummary> run_matrix(const Config& base, const MatrixSpec& spec, const fs::path& out_root,
                                    std::ostream* progress)
{
    if (spec.replications < 1) throw std::invalid_argument("run_matrix: replications must be positive");
    std::vector<ExperimentCell> jobs;
    std::vector<ExperimentCell> cells;
    for (Strategy s : spec.strategies) {
        for (int p : spec.peers) {
            for (double rate : spec.tx_rates) {
                cells.push_back(ExperimentCell{s, p, rate, 0});
                for (int r = 1; r <= spec.replications; ++r) jobs.push_back(ExperimentCell{s, p, rate, r});
            }
        }
    }
    for (const auto& cell : cells) cell_config(base, cell).validate();

    std::vector<std::optional<RunOutcome>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::string first_error;
    std::size_t done = 0;

    auto worker = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                RunOutcome out = run_cell(jobs[i], base, out_root, spec.run);
                std::lock_guard lock(mu);
                results[i] = std::move(out);
                ++done;
                if (progress) {
                    *progress << "[" << done << "/" << jobs.size() << "] " << cell_path(jobs[i]).generic_string()
                              << " forks=" << results[i]->summary.fork_count
                              << " prop=" << results[i]->summary.mean_propagation << "s\n"
                              << std::flush;
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(mu);
                if (!failed.exchange(true)) first_error = cell_path(jobs[i]).generic_string() + ": " + e.what();
                return;
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(spec.jobs, static_cast<int>(jobs.size())));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
    }
    fs::remove_all(out_root / ".staging");

    if (failed) {
        std::ostringstream msg;
        msg << "run failed: " << first_error << "; completed runs:";
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (results[i]) msg << ' ' << cell_path(jobs[i]).generic_string();
        }
        throw MatrixError(msg.str());
    }

    std::vector<CellSummary> summary;
    std::size_t k = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<RunOutcome> runs;
        for (int r = 0; r < spec.replications; ++r) runs.push_back(*results[k++]);
        summary.push_back(aggregate_cell(runs));
    }
    write_summary_csv(summary, out_root / "summary.csv");
    return summary;
}

}  // namespace p2psim
