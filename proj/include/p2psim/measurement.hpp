#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "p2psim/ledger.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/workload.hpp"

namespace p2psim {

class Simulation;

struct MempoolRow {
    TxId txid{0};
    SimTime t_a{};
    std::uint32_t t_size{0};
    std::uint32_t t_fee{0};
    std::optional<std::uint32_t> height;
};

struct ChainRow {
    BlockId hash{0};
    std::uint64_t b_size{0};
    SimTime b_t{};
    std::uint32_t height{0};
};

enum class BranchStatus { active, valid_fork, invalid };
std::string_view to_string(BranchStatus s);

struct BlockTreeRow {
    BlockId hash{0};
    std::uint32_t height{0};
    std::uint32_t branchlen{0};
    BranchStatus status{BranchStatus::active};
};

//! One side branch: its first block competes with the main-chain block at the same height.
struct ForkRecord {
    BlockId tip{0};
    BlockId fork_block{0};
    BlockId main_block{0};
    std::uint32_t height{0};
    std::uint32_t branchlen{0};
    //! |b_g(fork block) - b_g(main block)|
    SimTime gap{};
    //! Fork-relative shared fraction; empty when the fork block holds no transactions.
    std::optional<double> overlap;
};

struct ForkCensus {
    std::vector<BlockTreeRow> rows;
    std::vector<ForkRecord> forks;
    std::size_t overlap_excluded{0};
};

struct BlockPropagation {
    BlockId hash{0};
    NodeId miner{0};
    SimTime b_g{};
    std::size_t reached{0};
    SimTime p50{};
    SimTime p95{};
    SimTime max{};
};

enum class TxStatus { confirmed, mempool, unconfirmed, never_arrived };
std::string_view to_string(TxStatus s);

struct TxMetric {
    TxId txid{0};
    NodeId origin{0};
    SimTime t_g{};
    std::optional<SimTime> t_a;
    std::optional<std::uint32_t> height;
    std::optional<SimTime> confirmation;
    TxStatus status{TxStatus::never_arrived};

    std::optional<SimTime> propagation() const
    {
        if (!t_a) return std::nullopt;
        return *t_a - t_g;
    }
};

//! Everything collected at the measurement node for one run.
struct RunDatasets {
    std::vector<GenerationRecord> generation;
    std::vector<MempoolRow> mempool;
    std::vector<ChainRow> chain;
    ForkCensus census;
    std::vector<BlockPropagation> block_propagation;
    std::vector<TxMetric> metrics;

    std::size_t generated{0};
    std::size_t confirmed{0};
    std::size_t mempool_residue{0};
    std::size_t losses{0};
};

//! t_a - t_g in seconds.
double propagation_time(SimTime t_g, SimTime t_a);

/**
 * b_g of the block `depth` above the including block, minus t_g. The chain
 * is indexed by height (genesis at 0); nullopt when it is not deep enough.
 */
std::optional<SimTime> confirmation_time(const Ledger& ledger, const std::vector<BlockId>& main_chain,
                                         std::uint32_t tx_height, SimTime t_g, int depth = 6);

//! |txids(fork) ∩ txids(valid)| / |txids(fork)|; nullopt for an empty fork block.
std::optional<double> overlap_fraction(const Block& valid, const Block& fork);

/**
 * Main-chain rows (branchlen 0, active) plus one valid-fork row per side
 * branch tip; `tree` lists every block the node holds.
 */
ForkCensus fork_census(const Ledger& ledger, const std::vector<BlockId>& main_chain, const std::vector<BlockId>& tree);

RunDatasets collect_datasets(const Simulation& sim);

//! generation.csv, mempool.csv, chain.csv, blocktree.csv, metrics.csv, losses.csv, forks.csv, blockprop.csv
void write_datasets(const RunDatasets& data, const std::filesystem::path& dir);

//! Headline numbers of one run.
struct RunSummary {
    std::size_t generated{0};
    std::size_t confirmed{0};
    std::size_t mempool_residue{0};
    std::size_t losses{0};
    std::size_t arrived{0};
    double mean_propagation{0};
    double mean_confirmation{0};
    std::size_t fork_count{0};
    std::vector<double> overlaps;
    std::vector<double> fork_gaps;
    //! Per block, the 95th percentile of its arrival delay over nodes.
    std::vector<double> block_p95;
    std::size_t blocks{0};
};

RunSummary summarize(const RunDatasets& data);

}  // namespace p2psim
