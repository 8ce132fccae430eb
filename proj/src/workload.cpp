#include "p2psim/workload.hpp"

#include <stdexcept>
#include <string>

namespace p2psim {

std::optional<SimTime> next_generation(GeneratorState& state, SimTime now)
{
    const SimTime gap = SimTime::from_seconds(sample_exp(state.rng, state.mean_interval));
    // Strict inequality: nothing is generated at or past the horizon.
    if (!(now + gap < state.horizon)) return std::nullopt;
    return now + gap;
}

double network_block_rate(const Config& config)
{
    if (config.node_count < 2) throw std::invalid_argument("network_block_rate: need at least two nodes");
    return static_cast<double>(config.node_count - 1) * config.block_interval;
}

double tx_mean_interval(const Config& config)
{
    return 60.0 / config.tx_rate;
}

std::vector<GeneratorState> make_generators(const Config& config, GeneratorKind kind, std::uint64_t seed)
{
    const double mean = kind == GeneratorKind::tx ? tx_mean_interval(config) : network_block_rate(config);
    const SimTime horizon = SimTime::from_seconds(config.duration);
    const char* purpose = kind == GeneratorKind::tx ? "-txgen" : "-blockgen";
    std::vector<GeneratorState> out;
    for (NodeId k = 2; k <= static_cast<NodeId>(config.node_count); ++k) {
        out.push_back(GeneratorState{k, kind, mean, horizon, RngStream(seed, "node-" + std::to_string(k) + purpose)});
    }
    return out;
}

}  // namespace p2psim
