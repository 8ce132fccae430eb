#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2psim/config.hpp"
#include "p2psim/measurement.hpp"
#include "p2psim/stats.hpp"

namespace p2psim {

struct ExperimentCell {
    Strategy strategy{Strategy::normal};
    int peers{8};
    //! Transactions per minute per generating node.
    double tx_rate{3.0};
    //! 1-based replication index.
    int replication{1};
};

//! Injective in the cell coordinates for a fixed master seed.
std::uint64_t derive_seed(std::uint64_t master_seed, const ExperimentCell& cell);

//! <strategy>/P<peers>/lam<rate>/run<r>
std::filesystem::path cell_path(const ExperimentCell& cell);

//! `base` with the cell's strategy, peer count and rate applied.
Config cell_config(const Config& base, const ExperimentCell& cell);

struct RunOutcome {
    ExperimentCell cell;
    std::uint64_t seed{0};
    RunSummary summary;
    std::uint64_t events{0};
};

struct RunOptions {
    bool trace{false};
};

/**
 * Simulate one replication and write its datasets under
 * out_root/cell_path(cell). The directory appears atomically.
 */
RunOutcome run_cell(const ExperimentCell& cell, const Config& base, const std::filesystem::path& out_root,
                    RunOptions options = {});

struct MatrixSpec {
    std::vector<Strategy> strategies{Strategy::normal, Strategy::random, Strategy::mixed};
    std::vector<int> peers{4, 8};
    std::vector<double> tx_rates{3.0, 6.0};
    int replications{10};
    //! Simultaneous runs.
    int jobs{1};
    RunOptions run;
};

//! Aggregate over the replications of one (strategy, P, rate) cell.
struct CellSummary {
    Strategy strategy{Strategy::normal};
    int peers{0};
    double tx_rate{0};
    int replications{0};
    MeanCi propagation{};
    MeanCi confirmation{};
    MeanCi forks{};
    std::size_t fork_total{0};
    double overlap_mean{0};
    double overlap_std{0};
    std::size_t overlap_n{0};
    std::optional<double> fork_gap_median;
    std::optional<double> block_p95_median;
    std::size_t generated{0};
    std::size_t confirmed{0};
    std::size_t mempool_residue{0};
    std::size_t losses{0};
};

CellSummary aggregate_cell(const std::vector<RunOutcome>& runs);

class MatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Run every cell x replication (at most spec.jobs at a time), write
 * out_root/summary.csv and return the per-cell rows in matrix order.
 * Throws MatrixError listing completed cells if any run fails.
 */
std::vector<CellSummary> run_matrix(const Config& base, const MatrixSpec& spec, const std::filesystem::path& out_root,
                                    std::ostream* progress = nullptr);

void write_summary_csv(const std::vector<CellSummary>& rows, const std::filesystem::path& path);

std::string format_rate(double tx_rate);

}  // namespace p2psim
