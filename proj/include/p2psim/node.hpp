#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "p2psim/config.hpp"
#include "p2psim/ledger.hpp"
#include "p2psim/netmodel.hpp"
#include "p2psim/sim_core.hpp"

namespace p2psim {

/**
 * What a node needs from the world it lives in. The simulation implements
 * this; unit tests use a recording fake.
 */
class NodeEnv {
public:
    virtual ~NodeEnv() = default;
    virtual SimTime now() const = 0;
    virtual const Ledger& ledger() const = 0;
    //! Register a freshly assembled block and return its hash.
    virtual BlockId publish_block(Block block) = 0;
    virtual void send(Message msg) = 0;
    //! Ask for on_validation_done() to be invoked on `node` at time `at`.
    virtual void schedule_validation(NodeId node, SimTime at) = 0;
};

struct ProtocolParams {
    SimTime tx_validation{};
    SimTime block_validation{};
    std::size_t block_capacity{2000};
    std::uint32_t block_header_size{80};
    int msg_header_size{24};
    int inv_item_size{61};

    static ProtocolParams from_config(const Config& c);
};

enum class TxState : std::uint8_t { Unknown, Requested, Validating, Acquired };
enum class BlockState : std::uint8_t { Unknown, Requested, Validating, Orphan, InTree };

//! A chain-tip candidate as seen by one node.
struct TipCandidate {
    BlockId hash{kNoBlock};
    std::uint32_t height{0};
    //! Local time at which the node adopted the block into its tree.
    SimTime adopted{};
};

//! Longest chain wins; at equal height the block adopted first wins.
bool better_tip(const TipCandidate& a, const TipCandidate& b);

//! Best of a non-empty candidate set under better_tip.
BlockId select_tip(std::span<const TipCandidate> leaves);

/**
 * Per-node protocol state: mempool, block tree, a single FIFO validation
 * server, and legacy inv/getdata relaying over the node's neighbor set.
 *
 * A transaction is "in the mempool" when the node holds it and it is not in
 * a block of the node's current main chain. Reorgs move transactions between
 * the two without touching their local arrival time.
 */
class Node {
public:
    Node(NodeId id, std::vector<NodeId> peers, ProtocolParams params);

    NodeId id() const { return id_; }
    const std::vector<NodeId>& peers() const { return peers_; }

    void on_local_tx(NodeEnv& env, TxId tx);
    void on_message(NodeEnv& env, const Message& msg);
    void on_inv(NodeEnv& env, NodeId from, std::span<const InvItem> items);
    void on_getdata(NodeEnv& env, NodeId from, std::span<const InvItem> items);
    void on_tx(NodeEnv& env, NodeId from, TxId tx);
    void on_block(NodeEnv& env, NodeId from, BlockId block);
    void on_validation_done(NodeEnv& env);

    //! Mine on the current tip, apply locally and announce. Returns the new hash.
    BlockId assemble_block(NodeEnv& env);

    TxState tx_state(TxId tx) const;
    bool holds_tx(TxId tx) const { return tx_state(tx) == TxState::Acquired; }
    bool in_mempool(TxId tx) const;
    bool on_main_chain(TxId tx) const;
    //! First local acquisition time (t_a).
    std::optional<SimTime> tx_arrival(TxId tx) const;
    std::size_t mempool_size() const { return mempool_size_; }
    //! Mempool contents in (t_a, txid) order.
    std::vector<TxId> mempool_txids() const;
    //! Every tx this node ever held, in acquisition order.
    std::vector<TxId> acquired_txids() const;

    BlockState block_state(BlockId b) const;
    bool has_block(BlockId b) const { return block_state(b) == BlockState::InTree; }
    std::optional<SimTime> block_adopted(BlockId b) const;
    BlockId tip() const { return tip_; }
    std::uint32_t tip_height() const { return tip_height_; }
    //! Main chain from genesis to tip.
    std::vector<BlockId> main_chain(const Ledger& ledger) const;
    std::size_t validation_backlog() const { return validation_queue_.size(); }
    std::size_t reorg_count() const { return reorgs_; }

private:
    enum class JobKind : std::uint8_t { LocalTx, Tx, Block };
    struct Job {
        JobKind kind;
        std::uint32_t id;
        NodeId from;
    };
    struct TxSlot {
        TxState state{TxState::Unknown};
        bool on_main{false};
        std::uint32_t log_pos{0};
    };
    struct BlockSlot {
        BlockState state{BlockState::Unknown};
        SimTime adopted{};
    };
    struct LogEntry {
        SimTime t_a;
        TxId tx;
    };

    TxSlot& tx_slot(const NodeEnv& env, TxId tx);
    BlockSlot& block_slot(const NodeEnv& env, BlockId b);
    void enqueue_validation(NodeEnv& env, Job job);
    void start_next_validation(NodeEnv& env);
    void finish_tx(NodeEnv& env, const Job& job);
    void finish_block(NodeEnv& env, const Job& job);
    void acquire_tx(TxId tx, TxSlot& slot, SimTime now);
    //! Adds `b` (and any orphans waiting on it) to the tree; returns the newly adopted hashes.
    std::vector<BlockId> adopt_block(NodeEnv& env, BlockId b);
    void update_tip(NodeEnv& env, std::span<const BlockId> adopted);
    void reorg(NodeEnv& env, BlockId new_tip);
    void announce(NodeEnv& env, InvItem item, NodeId except);
    void send(NodeEnv& env, NodeId to, MessageKind kind, InvList items, std::uint32_t size);

    NodeId id_;
    std::vector<NodeId> peers_;
    ProtocolParams params_;

    std::vector<TxSlot> txs_;
    std::vector<LogEntry> arrival_log_;
    //! No mempool entry sits before this arrival_log_ index.
    std::size_t mempool_cursor_{0};
    std::size_t mempool_size_{0};

    std::vector<BlockSlot> blocks_;
    std::unordered_map<BlockId, std::vector<BlockId>> orphans_by_parent_;
    //! Relaying peer of each block awaiting adoption; it is skipped when announcing.
    std::unordered_map<BlockId, NodeId> orphan_senders_;
    BlockId tip_{kGenesis};
    std::uint32_t tip_height_{0};
    std::size_t reorgs_{0};

    std::deque<Job> validation_queue_;
    bool validating_{false};
};

}  // namespace p2psim
