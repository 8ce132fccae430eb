#include "p2psim/node.hpp"

#include <algorithm>
#include <stdexcept>

namespace p2psim {

ProtocolParams ProtocolParams::from_config(const Config& c)
{
    ProtocolParams p;
    p.tx_validation = SimTime::from_seconds(c.tx_validation_delay);
    p.block_validation = SimTime::from_seconds(c.block_validation_delay);
    p.block_capacity = static_cast<std::size_t>(c.block_capacity);
    p.block_header_size = static_cast<std::uint32_t>(c.block_header_size);
    p.msg_header_size = c.msg_header_size;
    p.inv_item_size = c.inv_item_size;
    return p;
}

bool better_tip(const TipCandidate& a, const TipCandidate& b)
{
    if (a.height != b.height) return a.height > b.height;
    if (a.adopted != b.adopted) return a.adopted < b.adopted;
    return a.hash < b.hash;
}

BlockId select_tip(std::span<const TipCandidate> leaves)
{
    if (leaves.empty()) throw std::invalid_argument("select_tip: no candidates");
    return std::min_element(leaves.begin(), leaves.end(),
                            [](const TipCandidate& a, const TipCandidate& b) { return better_tip(a, b); })
        ->hash;
}

Node::Node(NodeId id, std::vector<NodeId> peers, ProtocolParams params)
    : id_(id), peers_(std::move(peers)), params_(params), blocks_(1)
{
    blocks_[kGenesis].state = BlockState::InTree;
}

Node::TxSlot& Node::tx_slot(const NodeEnv& env, TxId tx)
{
    if (tx >= txs_.size()) {
        if (tx >= env.ledger().tx_count()) throw std::out_of_range("Node: unknown transaction id");
        txs_.resize(std::max<std::size_t>(env.ledger().tx_count(), txs_.size() * 3 / 2));
    }
    return txs_[tx];
}

Node::BlockSlot& Node::block_slot(const NodeEnv& env, BlockId b)
{
    if (b >= blocks_.size()) {
        if (b >= env.ledger().block_count()) throw std::out_of_range("Node: unknown block id");
        blocks_.resize(env.ledger().block_count());
    }
    return blocks_[b];
}

TxState Node::tx_state(TxId tx) const
{
    return tx < txs_.size() ? txs_[tx].state : TxState::Unknown;
}

bool Node::on_main_chain(TxId tx) const
{
    return tx < txs_.size() && txs_[tx].on_main;
}

bool Node::in_mempool(TxId tx) const
{
    return holds_tx(tx) && !txs_[tx].on_main;
}

std::optional<SimTime> Node::tx_arrival(TxId tx) const
{
    if (!holds_tx(tx)) return std::nullopt;
    return arrival_log_[txs_[tx].log_pos].t_a;
}

std::vector<TxId> Node::mempool_txids() const
{
    std::vector<TxId> out;
    out.reserve(mempool_size_);
    for (std::size_t i = mempool_cursor_; i < arrival_log_.size(); ++i) {
        if (!txs_[arrival_log_[i].tx].on_main) out.push_back(arrival_log_[i].tx);
    }
    return out;
}

std::vector<TxId> Node::acquired_txids() const
{
    std::vector<TxId> out;
    out.reserve(arrival_log_.size());
    for (const auto& e : arrival_log_) out.push_back(e.tx);
    return out;
}

BlockState Node::block_state(BlockId b) const
{
    return b < blocks_.size() ? blocks_[b].state : BlockState::Unknown;
}

std::optional<SimTime> Node::block_adopted(BlockId b) const
{
    if (!has_block(b)) return std::nullopt;
    return blocks_[b].adopted;
}

std::vector<BlockId> Node::main_chain(const Ledger& ledger) const
{
    std::vector<BlockId> chain;
    for (BlockId b = tip_; b != kNoBlock; b = ledger.block(b).prev_hash) chain.push_back(b);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

void Node::send(NodeEnv& env, NodeId to, MessageKind kind, InvList items, std::uint32_t size)
{
    Message msg;
    msg.kind = kind;
    msg.items = std::move(items);
    msg.body_size = size;
    msg.src = id_;
    msg.dst = to;
    msg.send_time = env.now();
    env.send(std::move(msg));
}

void Node::announce(NodeEnv& env, InvItem item, NodeId except)
{
    const auto size = static_cast<std::uint32_t>(params_.msg_header_size + params_.inv_item_size);
    for (NodeId peer : peers_) {
        if (peer != except) send(env, peer, MessageKind::Inv, {item}, size);
    }
}

void Node::on_message(NodeEnv& env, const Message& msg)
{
    switch (msg.kind) {
    case MessageKind::Inv: on_inv(env, msg.src, {msg.items.data(), msg.items.size()}); break;
    case MessageKind::GetData: on_getdata(env, msg.src, {msg.items.data(), msg.items.size()}); break;
    case MessageKind::TxPayload: on_tx(env, msg.src, msg.items.at(0).id); break;
    case MessageKind::BlockPayload: on_block(env, msg.src, msg.items.at(0).id); break;
    }
}

void Node::on_local_tx(NodeEnv& env, TxId tx)
{
    TxSlot& slot = tx_slot(env, tx);
    if (slot.state != TxState::Unknown) return;
    slot.state = TxState::Validating;
    enqueue_validation(env, Job{JobKind::LocalTx, tx, 0});
}

void Node::on_inv(NodeEnv& env, NodeId from, std::span<const InvItem> items)
{
    InvList wanted;
    for (const InvItem& item : items) {
        if (item.type == ItemType::Tx) {
            TxSlot& slot = tx_slot(env, item.id);
            if (slot.state != TxState::Unknown) continue;
            slot.state = TxState::Requested;
        } else {
            BlockSlot& slot = block_slot(env, item.id);
            if (slot.state != BlockState::Unknown) continue;
            slot.state = BlockState::Requested;
        }
        wanted.push_back(item);
    }
    if (wanted.empty()) return;
    const std::uint32_t size = static_cast<std::uint32_t>(params_.msg_header_size) +
                               static_cast<std::uint32_t>(params_.inv_item_size) * static_cast<std::uint32_t>(wanted.size());
    send(env, from, MessageKind::GetData, std::move(wanted), size);
}

void Node::on_getdata(NodeEnv& env, NodeId from, std::span<const InvItem> items)
{
    const Ledger& ledger = env.ledger();
    for (const InvItem& item : items) {
        if (item.type == ItemType::Tx) {
            if (!holds_tx(item.id)) continue;
            send(env, from, MessageKind::TxPayload, {item}, ledger.tx(item.id).size);
        } else {
            const BlockState st = block_state(item.id);
            if (st != BlockState::InTree && st != BlockState::Orphan) continue;
            send(env, from, MessageKind::BlockPayload, {item}, static_cast<std::uint32_t>(ledger.block(item.id).size));
        }
    }
}

void Node::on_tx(NodeEnv& env, NodeId from, TxId tx)
{
    TxSlot& slot = tx_slot(env, tx);
    if (slot.state == TxState::Validating || slot.state == TxState::Acquired) return;
    slot.state = TxState::Validating;
    enqueue_validation(env, Job{JobKind::Tx, tx, from});
}

void Node::on_block(NodeEnv& env, NodeId from, BlockId block)
{
    BlockSlot& slot = block_slot(env, block);
    if (slot.state != BlockState::Unknown && slot.state != BlockState::Requested) return;
    slot.state = BlockState::Validating;
    enqueue_validation(env, Job{JobKind::Block, block, from});
}

void Node::enqueue_validation(NodeEnv& env, Job job)
{
    validation_queue_.push_back(job);
    if (!validating_) start_next_validation(env);
}

void Node::start_next_validation(NodeEnv& env)
{
    const Job& job = validation_queue_.front();
    const SimTime cost = job.kind == JobKind::Block ? params_.block_validation : params_.tx_validation;
    validating_ = true;
    env.schedule_validation(id_, env.now() + cost);
}

void Node::on_validation_done(NodeEnv& env)
{
    if (validation_queue_.empty()) throw std::logic_error("Node: validation completion with empty backlog");
    const Job job = validation_queue_.front();
    validation_queue_.pop_front();
    validating_ = false;
    if (job.kind == JobKind::Block) finish_block(env, job);
    else finish_tx(env, job);
    if (!validating_ && !validation_queue_.empty()) start_next_validation(env);
}

void Node::acquire_tx(TxId tx, TxSlot& slot, SimTime now)
{
    slot.state = TxState::Acquired;
    slot.log_pos = static_cast<std::uint32_t>(arrival_log_.size());
    arrival_log_.push_back(LogEntry{now, tx});
    if (!slot.on_main) ++mempool_size_;
}

void Node::finish_tx(NodeEnv& env, const Job& job)
{
    TxSlot& slot = tx_slot(env, job.id);
    // Already learned from a block while this copy sat in the backlog.
    if (slot.state == TxState::Acquired) return;
    acquire_tx(job.id, slot, env.now());
    announce(env, InvItem{ItemType::Tx, job.id}, job.kind == JobKind::LocalTx ? 0 : job.from);
}

void Node::finish_block(NodeEnv& env, const Job& job)
{
    const Block& block = env.ledger().block(job.id);
    BlockSlot& slot = block_slot(env, job.id);
    if (block_state(block.prev_hash) != BlockState::InTree) {
        slot.state = BlockState::Orphan;
        orphan_senders_[job.id] = job.from;
        orphans_by_parent_[block.prev_hash].push_back(job.id);
        return;
    }
    orphan_senders_[job.id] = job.from;
    const std::vector<BlockId> adopted = adopt_block(env, job.id);
    update_tip(env, adopted);
    for (BlockId b : adopted) {
        const auto it = orphan_senders_.find(b);
        const NodeId except = it == orphan_senders_.end() ? 0 : it->second;
        if (it != orphan_senders_.end()) orphan_senders_.erase(it);
        announce(env, InvItem{ItemType::Block, b}, except);
    }
}

std::vector<BlockId> Node::adopt_block(NodeEnv& env, BlockId b)
{
    const Ledger& ledger = env.ledger();
    const SimTime now = env.now();
    std::vector<BlockId> adopted;
    std::vector<BlockId> pending{b};
    while (!pending.empty()) {
        const BlockId cur = pending.back();
        pending.pop_back();
        BlockSlot& slot = block_slot(env, cur);
        slot.state = BlockState::InTree;
        slot.adopted = now;
        for (TxId tx : ledger.block(cur).txids) {
            TxSlot& ts = tx_slot(env, tx);
            if (ts.state != TxState::Acquired) acquire_tx(tx, ts, now);
        }
        adopted.push_back(cur);
        if (auto it = orphans_by_parent_.find(cur); it != orphans_by_parent_.end()) {
            pending.insert(pending.end(), it->second.begin(), it->second.end());
            orphans_by_parent_.erase(it);
        }
    }
    return adopted;
}

void Node::update_tip(NodeEnv& env, std::span<const BlockId> adopted)
{
    const Ledger& ledger = env.ledger();
    TipCandidate best{tip_, tip_height_, blocks_[tip_].adopted};
    for (BlockId b : adopted) {
        const TipCandidate cand{b, ledger.block(b).height, blocks_[b].adopted};
        if (better_tip(cand, best)) best = cand;
    }
    if (best.hash != tip_) reorg(env, best.hash);
}

void Node::reorg(NodeEnv& env, BlockId new_tip)
{
    const Ledger& ledger = env.ledger();
    std::vector<BlockId> disconnect;
    std::vector<BlockId> connect;
    BlockId a = tip_;
    BlockId b = new_tip;
    while (ledger.block(a).height > ledger.block(b).height) {
        disconnect.push_back(a);
        a = ledger.block(a).prev_hash;
    }
    while (ledger.block(b).height > ledger.block(a).height) {
        connect.push_back(b);
        b = ledger.block(b).prev_hash;
    }
    while (a != b) {
        disconnect.push_back(a);
        connect.push_back(b);
        a = ledger.block(a).prev_hash;
        b = ledger.block(b).prev_hash;
    }
    for (BlockId blk : disconnect) {
        for (TxId tx : ledger.block(blk).txids) {
            TxSlot& slot = txs_[tx];
            slot.on_main = false;
            ++mempool_size_;
            mempool_cursor_ = std::min<std::size_t>(mempool_cursor_, slot.log_pos);
        }
    }
    for (auto it = connect.rbegin(); it != connect.rend(); ++it) {
        for (TxId tx : ledger.block(*it).txids) {
            TxSlot& slot = txs_[tx];
            if (slot.on_main) throw std::logic_error("Node: transaction included twice on one chain");
            slot.on_main = true;
            --mempool_size_;
        }
    }
    if (!disconnect.empty()) ++reorgs_;
    tip_ = new_tip;
    tip_height_ = ledger.block(new_tip).height;
}

BlockId Node::assemble_block(NodeEnv& env)
{
    const Ledger& ledger = env.ledger();
    while (mempool_cursor_ < arrival_log_.size() && txs_[arrival_log_[mempool_cursor_].tx].on_main) ++mempool_cursor_;

    Block block;
    block.prev_hash = tip_;
    block.height = tip_height_ + 1;
    block.miner = id_;
    block.b_g = env.now();
    block.size = params_.block_header_size;
    for (std::size_t i = mempool_cursor_; i < arrival_log_.size() && block.txids.size() < params_.block_capacity; ++i) {
        const TxId tx = arrival_log_[i].tx;
        if (txs_[tx].on_main) continue;
        block.txids.push_back(tx);
        block.size += ledger.tx(tx).size;
    }
    const BlockId hash = env.publish_block(std::move(block));
    const std::vector<BlockId> adopted = adopt_block(env, hash);
    update_tip(env, adopted);
    announce(env, InvItem{ItemType::Block, hash}, 0);
    return hash;
}

}  // namespace p2psim
