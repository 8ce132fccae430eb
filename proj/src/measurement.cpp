#include "p2psim/measurement.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "p2psim/simulation.hpp"
#include "p2psim/stats.hpp"

namespace p2psim {

std::string_view to_string(BranchStatus s)
{
    switch (s) {
    case BranchStatus::active: return "active";
    case BranchStatus::valid_fork: return "valid-fork";
    case BranchStatus::invalid: return "invalid";
    }
    return "?";
}

std::string_view to_string(TxStatus s)
{
    switch (s) {
    case TxStatus::confirmed: return "confirmed";
    case TxStatus::mempool: return "mempool";
    case TxStatus::unconfirmed: return "unconfirmed";
    case TxStatus::never_arrived: return "never-arrived";
    }
    return "?";
}

double propagation_time(SimTime t_g, SimTime t_a)
{
    return (t_a - t_g).seconds();
}

std::optional<SimTime> confirmation_time(const Ledger& ledger, const std::vector<BlockId>& main_chain,
                                         std::uint32_t tx_height, SimTime t_g, int depth)
{
    const std::size_t target = static_cast<std::size_t>(tx_height) + static_cast<std::size_t>(depth);
    if (target >= main_chain.size()) return std::nullopt;
    return ledger.block(main_chain[target]).b_g - t_g;
}

std::optional<double> overlap_fraction(const Block& valid, const Block& fork)
{
    if (fork.txids.empty()) return std::nullopt;
    std::vector<TxId> a = valid.txids;
    std::vector<TxId> b = fork.txids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<TxId> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(b.size());
}

ForkCensus fork_census(const Ledger& ledger, const std::vector<BlockId>& main_chain, const std::vector<BlockId>& tree)
{
    ForkCensus census;
    const std::unordered_set<BlockId> on_main(main_chain.begin(), main_chain.end());
    const std::unordered_set<BlockId> held(tree.begin(), tree.end());
    std::unordered_set<BlockId> has_child;
    for (BlockId b : tree) {
        const BlockId parent = ledger.block(b).prev_hash;
        if (parent != kNoBlock) has_child.insert(parent);
    }
    for (BlockId b : main_chain) {
        census.rows.push_back(BlockTreeRow{b, ledger.block(b).height, 0, BranchStatus::active});
    }
    std::vector<BlockId> tips;
    for (BlockId b : tree) {
        if (!on_main.count(b) && !has_child.count(b)) tips.push_back(b);
    }
    std::sort(tips.begin(), tips.end());
    for (BlockId tip : tips) {
        std::uint32_t len = 0;
        BlockId cur = tip;
        BlockId first = tip;
        BranchStatus status = BranchStatus::valid_fork;
        while (cur != kNoBlock && !on_main.count(cur)) {
            if (!held.count(cur)) {
                status = BranchStatus::invalid;
                break;
            }
            first = cur;
            ++len;
            cur = ledger.block(cur).prev_hash;
        }
        const Block& tip_block = ledger.block(tip);
        census.rows.push_back(BlockTreeRow{tip, tip_block.height, len, status});
        if (status != BranchStatus::valid_fork) continue;

        ForkRecord rec;
        rec.tip = tip;
        rec.fork_block = first;
        rec.height = ledger.block(first).height;
        rec.branchlen = len;
        rec.main_block = rec.height < main_chain.size() ? main_chain[rec.height] : kNoBlock;
        if (rec.main_block != kNoBlock) {
            const Block& fb = ledger.block(first);
            const Block& mb = ledger.block(rec.main_block);
            rec.gap = fb.b_g > mb.b_g ? fb.b_g - mb.b_g : mb.b_g - fb.b_g;
            rec.overlap = overlap_fraction(mb, fb);
            if (!rec.overlap) ++census.overlap_excluded;
        }
        census.forks.push_back(rec);
    }
    return census;
}

RunDatasets collect_datasets(const Simulation& sim)
{
    const Ledger& ledger = sim.ledger();
    const Node& probe = sim.node(kMeasurementNode);
    const int depth = sim.config().confirmation_depth;
    RunDatasets data;
    data.generation = sim.generation_log();

    const std::vector<BlockId> chain = probe.main_chain(ledger);
    std::vector<std::optional<std::uint32_t>> tx_height(ledger.tx_count());
    for (BlockId b : chain) {
        const Block& blk = ledger.block(b);
        data.chain.push_back(ChainRow{b, blk.size, blk.b_g, blk.height});
        for (TxId tx : blk.txids) tx_height[tx] = blk.height;
    }

    for (TxId tx : probe.acquired_txids()) {
        const Transaction& t = ledger.tx(tx);
        data.mempool.push_back(MempoolRow{tx, *probe.tx_arrival(tx), t.size, t.fee, tx_height[tx]});
    }

    std::vector<BlockId> tree;
    for (BlockId b = 0; b < ledger.block_count(); ++b) {
        if (probe.has_block(b)) tree.push_back(b);
    }
    data.census = fork_census(ledger, chain, tree);

    for (BlockId b = 1; b < ledger.block_count(); ++b) {
        const Block& blk = ledger.block(b);
        std::vector<double> delays;
        for (NodeId k = 1; k <= sim.node_count(); ++k) {
            if (k == blk.miner) continue;
            if (auto at = sim.node(k).block_adopted(b)) delays.push_back(static_cast<double>((*at - blk.b_g).ns));
        }
        BlockPropagation bp{b, blk.miner, blk.b_g, delays.size(), {}, {}, {}};
        if (!delays.empty()) {
            bp.p50 = SimTime{static_cast<std::int64_t>(percentile(delays, 0.50))};
            bp.p95 = SimTime{static_cast<std::int64_t>(percentile(delays, 0.95))};
            bp.max = SimTime{static_cast<std::int64_t>(*std::max_element(delays.begin(), delays.end()))};
        }
        data.block_propagation.push_back(bp);
    }

    for (const Transaction& t : ledger.txs()) {
        TxMetric m;
        m.txid = t.txid;
        m.origin = t.origin;
        m.t_g = t.t_g;
        m.t_a = probe.tx_arrival(t.txid);
        m.height = tx_height[t.txid];
        if (m.height) {
            m.confirmation = confirmation_time(ledger, chain, *m.height, t.t_g, depth);
            m.status = m.confirmation ? TxStatus::confirmed : TxStatus::unconfirmed;
        } else if (probe.in_mempool(t.txid)) {
            m.status = TxStatus::mempool;
        } else {
            m.status = TxStatus::never_arrived;
        }
        switch (m.status) {
        case TxStatus::confirmed: ++data.confirmed; break;
        case TxStatus::mempool: ++data.mempool_residue; break;
        default: ++data.losses; break;
        }
        data.metrics.push_back(m);
    }
    data.generated = ledger.tx_count();
    return data;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string opt_str(const std::optional<T>& v)
{
    if (!v) return {};
    if constexpr (std::is_same_v<T, SimTime>) return format_seconds(*v);
    else if constexpr (std::is_same_v<T, double>) return fmt_double(*v);
    else return std::to_string(*v);
}

}  // namespace

void write_datasets(const RunDatasets& data, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        auto os = open_csv(dir / "generation.csv");
        os << "node,kind,id,t_g\n";
        for (const auto& r : data.generation) {
            os << r.node << ',' << (r.kind == ItemType::Tx ? "tx" : "block") << ','
               << (r.kind == ItemType::Tx ? tx_token(r.id) : block_token(r.id)) << ',' << format_seconds(r.time) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "mempool.csv");
        os << "txid,t_a,t_size,t_fee,B_height\n";
        for (const auto& r : data.mempool) {
            os << tx_token(r.txid) << ',' << format_seconds(r.t_a) << ',' << r.t_size << ',' << r.t_fee << ','
               << opt_str(r.height) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "chain.csv");
        os << "hash,b_size,b_t,B_height\n";
        for (const auto& r : data.chain) {
            os << block_token(r.hash) << ',' << r.b_size << ',' << format_seconds(r.b_t) << ',' << r.height << '\n';
        }
    }
    {
        auto os = open_csv(dir / "blocktree.csv");
        os << "hash,B_height,branchlen,status\n";
        for (const auto& r : data.census.rows) {
            os << block_token(r.hash) << ',' << r.height << ',' << r.branchlen << ',' << to_string(r.status) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "forks.csv");
        os << "tip_hash,fork_hash,B_height,branchlen,main_hash,gap,overlap\n";
        for (const auto& r : data.census.forks) {
            os << block_token(r.tip) << ',' << block_token(r.fork_block) << ',' << r.height << ',' << r.branchlen << ','
               << (r.main_block == kNoBlock ? std::string() : block_token(r.main_block)) << ',' << format_seconds(r.gap)
               << ',' << opt_str(r.overlap) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "blockprop.csv");
        os << "hash,miner,b_g,reached,p50,p95,max\n";
        for (const auto& r : data.block_propagation) {
            os << block_token(r.hash) << ',' << r.miner << ',' << format_seconds(r.b_g) << ',' << r.reached << ','
               << format_seconds(r.p50) << ',' << format_seconds(r.p95) << ',' << format_seconds(r.max) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "metrics.csv");
        os << "txid,origin,t_g,t_a,propagation,B_height,confirmation,status\n";
        for (const auto& m : data.metrics) {
            os << tx_token(m.txid) << ',' << m.origin << ',' << format_seconds(m.t_g) << ',' << opt_str(m.t_a) << ','
               << opt_str(m.propagation()) << ',' << opt_str(m.height) << ',' << opt_str(m.confirmation) << ','
               << to_string(m.status) << '\n';
        }
    }
    {
        auto os = open_csv(dir / "losses.csv");
        os << "txid,t_g,reason\n";
        for (const auto& m : data.metrics) {
            if (m.status == TxStatus::unconfirmed || m.status == TxStatus::never_arrived) {
                os << tx_token(m.txid) << ',' << format_seconds(m.t_g) << ',' << to_string(m.status) << '\n';
            }
        }
    }
}

RunSummary summarize(const RunDatasets& data)
{
    RunSummary s;
    s.generated = data.generated;
    s.confirmed = data.confirmed;
    s.mempool_residue = data.mempool_residue;
    s.losses = data.losses;
    double prop_sum = 0.0;
    double conf_sum = 0.0;
    for (const auto& m : data.metrics) {
        if (auto p = m.propagation()) {
            prop_sum += p->seconds();
            ++s.arrived;
        }
        if (m.confirmation) conf_sum += m.confirmation->seconds();
    }
    s.mean_propagation = s.arrived ? prop_sum / static_cast<double>(s.arrived) : 0.0;
    s.mean_confirmation = s.confirmed ? conf_sum / static_cast<double>(s.confirmed) : 0.0;
    for (const auto& f : data.census.forks) {
        ++s.fork_count;
        s.fork_gaps.push_back(f.gap.seconds());
        if (f.overlap) s.overlaps.push_back(*f.overlap);
    }
    for (const auto& bp : data.block_propagation) {
        if (bp.reached) s.block_p95.push_back(bp.p95.seconds());
    }
    s.blocks = data.block_propagation.size();
    return s;
}

}  // namespace p2psim
