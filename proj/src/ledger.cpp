#include "p2psim/ledger.hpp"

#include <stdexcept>

namespace p2psim {

Ledger::Ledger(std::uint32_t block_header_size)
{
    Block genesis;
    genesis.hash = kGenesis;
    genesis.size = block_header_size;
    blocks_.push_back(std::move(genesis));
}

TxId Ledger::add_tx(NodeId origin, SimTime t_g, std::uint32_t size, std::uint32_t fee)
{
    const auto id = static_cast<TxId>(txs_.size());
    txs_.push_back(Transaction{id, origin, t_g, size, fee});
    return id;
}

BlockId Ledger::add_block(Block block)
{
    if (block.prev_hash >= blocks_.size()) throw std::logic_error("Ledger::add_block: unknown parent");
    if (block.height != blocks_[block.prev_hash].height + 1) throw std::logic_error("Ledger::add_block: bad height");
    block.hash = static_cast<BlockId>(blocks_.size());
    blocks_.push_back(std::move(block));
    return blocks_.back().hash;
}

std::string tx_token(TxId id)
{
    return "tx" + std::to_string(id);
}

std::string block_token(BlockId id)
{
    return id == kGenesis ? std::string("genesis") : "blk" + std::to_string(id);
}

}  // namespace p2psim
