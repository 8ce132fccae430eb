#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

#include "p2psim/config.hpp"
#include "p2psim/ledger.hpp"
#include "p2psim/netmodel.hpp"
#include "p2psim/node.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/topology.hpp"
#include "p2psim/workload.hpp"

namespace p2psim {

struct SimulationOptions {
    //! Run the Poisson tx/block generators of nodes 2..C.
    bool generators{true};
    //! Optional protocol trace sink (CSV: time,node,direction,kind,item).
    std::ostream* trace{nullptr};
};

/**
 * One replication: the overlay, every node, every directed link and the
 * event loop driving them. Single-threaded; distinct instances share nothing.
 */
class Simulation : private NodeEnv {
public:
    Simulation(Config config, OverlayGraph graph, std::uint64_t seed, SimulationOptions options = {});

    //! Build the overlay from the configured strategy using the "topology" stream of `seed`.
    static Simulation create(const Config& config, std::uint64_t seed, SimulationOptions options = {});

    //! Generators up to duration, then drain until no event is pending.
    void run();

    void start_generators();
    void run_until(SimTime horizon);
    void drain();

    //! One-off local transaction at `origin`, time `at` (test hook; bypasses generators).
    void inject_tx(NodeId origin, SimTime at);
    //! One-off block found by `miner` at `at`.
    void inject_block(NodeId miner, SimTime at);

    const Config& config() const { return config_; }
    const OverlayGraph& graph() const { return graph_; }
    const Ledger& ledger() const override { return ledger_; }
    const Node& node(NodeId id) const { return nodes_.at(id - 1); }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<GenerationRecord>& generation_log() const { return generation_log_; }
    SimTime now() const override { return queue_.now(); }
    std::uint64_t events_processed() const { return queue_.processed(); }
    std::uint64_t messages_sent() const { return messages_sent_; }
    std::size_t pending_events() const { return queue_.size(); }
    int rejected_topologies() const { return rejected_topologies_; }

private:
    BlockId publish_block(Block block) override;
    void send(Message msg) override;
    void schedule_validation(NodeId node, SimTime at) override;

    void dispatch(const Event& ev);
    void generate_tx(NodeId origin);
    void generate_block(NodeId miner);
    void trace(NodeId node, std::string_view direction, const Message& msg);
    Link& link(NodeId src, NodeId dst);

    // Generator-driven events carry this ref; injected one-offs carry 0.
    static constexpr std::uint32_t kFromGenerator = 1;

    Config config_;
    OverlayGraph graph_;
    NetParams net_;
    Ledger ledger_;
    std::vector<Node> nodes_;
    std::vector<std::vector<Link>> links_;
    std::vector<RngStream> link_rng_;
    std::vector<RngStream> fee_rng_;
    std::vector<GeneratorState> tx_gens_;
    std::vector<GeneratorState> block_gens_;
    EventQueue queue_;
    std::vector<Message> messages_;
    std::vector<std::uint32_t> free_messages_;
    std::vector<GenerationRecord> generation_log_;
    SimulationOptions options_;
    std::uint64_t messages_sent_{0};
    int rejected_topologies_{0};
};

}  // namespace p2psim
