#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "p2psim/netmodel.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/topology.hpp"

namespace p2psim {

inline constexpr BlockId kGenesis = 0;
inline constexpr BlockId kNoBlock = std::numeric_limits<BlockId>::max();

struct Transaction {
    TxId txid{0};
    NodeId origin{0};
    SimTime t_g{};
    std::uint32_t size{0};
    std::uint32_t fee{0};
};

struct Block {
    BlockId hash{kNoBlock};
    //! kNoBlock for genesis.
    BlockId prev_hash{kNoBlock};
    std::uint32_t height{0};
    //! 0 for genesis.
    NodeId miner{0};
    SimTime b_g{};
    std::vector<TxId> txids;
    std::uint64_t size{0};
};

/**
 * Every transaction and block ever created in one run. Objects are
 * immutable once added; nodes refer to them by id.
 */
class Ledger {
public:
    explicit Ledger(std::uint32_t block_header_size = 80);

    TxId add_tx(NodeId origin, SimTime t_g, std::uint32_t size, std::uint32_t fee);

    //! Assigns the hash and returns it; height must be parent height + 1.
    BlockId add_block(Block block);

    const Transaction& tx(TxId id) const { return txs_.at(id); }
    const Block& block(BlockId id) const { return blocks_.at(id); }
    std::size_t tx_count() const { return txs_.size(); }
    std::size_t block_count() const { return blocks_.size(); }
    const std::vector<Transaction>& txs() const { return txs_; }
    const std::vector<Block>& blocks() const { return blocks_; }

private:
    std::vector<Transaction> txs_;
    std::vector<Block> blocks_;
};

std::string tx_token(TxId id);
std::string block_token(BlockId id);

}  // namespace p2psim
