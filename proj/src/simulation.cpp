#include "p2psim/simulation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace p2psim {

Simulation::Simulation(Config config, OverlayGraph graph, std::uint64_t seed, SimulationOptions options)
    : config_(std::move(config)),
      graph_(std::move(graph)),
      net_(NetParams::from_config(config_)),
      ledger_(static_cast<std::uint32_t>(config_.block_header_size)),
      options_(options)
{
    config_.validate();
    if (graph_.node_count() != static_cast<std::size_t>(config_.node_count)) {
        throw std::invalid_argument("Simulation: overlay size does not match node_count");
    }
    const ProtocolParams params = ProtocolParams::from_config(config_);
    const auto n = static_cast<NodeId>(config_.node_count);
    nodes_.reserve(n);
    links_.resize(n);
    for (NodeId k = 1; k <= n; ++k) {
        nodes_.emplace_back(k, graph_.neighbors(k), params);
        for (NodeId peer : graph_.neighbors(k)) links_[k - 1].push_back(Link{k, peer, SimTime::zero()});
        link_rng_.emplace_back(seed, "node-" + std::to_string(k) + "-link");
        fee_rng_.emplace_back(seed, "node-" + std::to_string(k) + "-txfee");
    }
    tx_gens_ = make_generators(config_, GeneratorKind::tx, seed);
    block_gens_ = make_generators(config_, GeneratorKind::block, seed);
    if (options_.trace) *options_.trace << "time,node,direction,kind,item\n";
}

Simulation Simulation::create(const Config& config, std::uint64_t seed, SimulationOptions options)
{
    config.validate();
    RngStream topo(seed, "topology");
    OverlayBuild built = build_overlay(config, topo);
    Simulation sim(config, std::move(built.graph), seed, options);
    sim.rejected_topologies_ = built.rejected_draws;
    return sim;
}

void Simulation::run()
{
    if (options_.generators) start_generators();
    run_until(SimTime::from_seconds(config_.duration));
    drain();
}

void Simulation::start_generators()
{
    const SimTime now = queue_.now();
    for (auto& gen : tx_gens_) {
        if (auto at = next_generation(gen, now)) queue_.schedule(*at, EventKind::GenerateTx, gen.node, kFromGenerator);
    }
    for (auto& gen : block_gens_) {
        if (auto at = next_generation(gen, now)) queue_.schedule(*at, EventKind::GenerateBlock, gen.node, kFromGenerator);
    }
}

void Simulation::run_until(SimTime horizon)
{
    queue_.run_until(horizon, [this](const Event& ev) { dispatch(ev); });
}

void Simulation::drain()
{
    queue_.drain([this](const Event& ev) { dispatch(ev); });
}

void Simulation::inject_tx(NodeId origin, SimTime at)
{
    queue_.schedule(at, EventKind::GenerateTx, origin, 0);
}

void Simulation::inject_block(NodeId miner, SimTime at)
{
    queue_.schedule(at, EventKind::GenerateBlock, miner, 0);
}

void Simulation::dispatch(const Event& ev)
{
    switch (ev.kind) {
    case EventKind::GenerateTx:
        generate_tx(ev.node);
        if (ev.ref == kFromGenerator) {
            auto& gen = tx_gens_.at(ev.node - 2);
            if (auto at = next_generation(gen, queue_.now())) queue_.schedule(*at, EventKind::GenerateTx, ev.node, kFromGenerator);
        }
        break;
    case EventKind::GenerateBlock:
        generate_block(ev.node);
        if (ev.ref == kFromGenerator) {
            auto& gen = block_gens_.at(ev.node - 2);
            if (auto at = next_generation(gen, queue_.now())) {
                queue_.schedule(*at, EventKind::GenerateBlock, ev.node, kFromGenerator);
            }
        }
        break;
    case EventKind::MsgDelivery: {
        const Message msg = std::move(messages_[ev.ref]);
        free_messages_.push_back(ev.ref);
        trace(msg.dst, "recv", msg);
        nodes_[msg.dst - 1].on_message(*this, msg);
        break;
    }
    case EventKind::ValidationDone: nodes_[ev.node - 1].on_validation_done(*this); break;
    }
}

void Simulation::generate_tx(NodeId origin)
{
    const auto fee = static_cast<std::uint32_t>(fee_rng_[origin - 1].uniform_int(1, 1000));
    const TxId id = ledger_.add_tx(origin, queue_.now(), static_cast<std::uint32_t>(config_.tx_size), fee);
    generation_log_.push_back(GenerationRecord{origin, ItemType::Tx, id, queue_.now()});
    nodes_[origin - 1].on_local_tx(*this, id);
}

void Simulation::generate_block(NodeId miner)
{
    const BlockId id = nodes_[miner - 1].assemble_block(*this);
    generation_log_.push_back(GenerationRecord{miner, ItemType::Block, id, queue_.now()});
}

BlockId Simulation::publish_block(Block block)
{
    return ledger_.add_block(std::move(block));
}

Link& Simulation::link(NodeId src, NodeId dst)
{
    const auto& peers = graph_.neighbors(src);
    const auto it = std::lower_bound(peers.begin(), peers.end(), dst);
    if (it == peers.end() || *it != dst) throw std::logic_error("Simulation: no link between the two nodes");
    return links_[src - 1][static_cast<std::size_t>(it - peers.begin())];
}

void Simulation::send(Message msg)
{
    const Transmission tx = transmit(link(msg.src, msg.dst), msg, queue_.now(), link_rng_[msg.src - 1], net_);
    trace(msg.src, "send", msg);
    std::uint32_t slot;
    if (free_messages_.empty()) {
        slot = static_cast<std::uint32_t>(messages_.size());
        messages_.push_back(std::move(msg));
    } else {
        slot = free_messages_.back();
        free_messages_.pop_back();
        messages_[slot] = std::move(msg);
    }
    ++messages_sent_;
    queue_.schedule(tx.delivery, EventKind::MsgDelivery, messages_[slot].dst, slot);
}

void Simulation::schedule_validation(NodeId node, SimTime at)
{
    queue_.schedule(at, EventKind::ValidationDone, node);
}

void Simulation::trace(NodeId node, std::string_view direction, const Message& msg)
{
    if (!options_.trace) return;
    auto& os = *options_.trace;
    for (const InvItem& item : msg.items) {
        os << format_seconds(queue_.now()) << ',' << node << ',' << direction << ',' << to_string(msg.kind) << ','
           << (item.type == ItemType::Tx ? tx_token(item.id) : block_token(item.id)) << '\n';
    }
}

}  // namespace p2psim
