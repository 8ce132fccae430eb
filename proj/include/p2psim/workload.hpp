#pragma once

#include <optional>

#include "p2psim/config.hpp"
#include "p2psim/ledger.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/topology.hpp"

namespace p2psim {

enum class GeneratorKind { tx, block };

//! Poisson generator of one node: exponential gaps, stops at the horizon.
struct GeneratorState {
    NodeId node{0};
    GeneratorKind kind{GeneratorKind::tx};
    double mean_interval{1.0};
    //! Generation instants must fall strictly before this.
    SimTime horizon{};
    RngStream rng;
};

//! Draw the next gap; nullopt once now + gap reaches the horizon.
std::optional<SimTime> next_generation(GeneratorState& state, SimTime now);

//! Per-node mean seconds between blocks so that C-1 miners together average block_interval.
double network_block_rate(const Config& config);

//! Per-node mean seconds between transactions (60 / tx_rate).
double tx_mean_interval(const Config& config);

//! Generators for nodes 2..C (the measurement node never generates).
std::vector<GeneratorState> make_generators(const Config& config, GeneratorKind kind, std::uint64_t seed);

struct GenerationRecord {
    NodeId node{0};
    ItemType kind{ItemType::Tx};
    std::uint32_t id{0};
    SimTime time{};
};

}  // namespace p2psim
