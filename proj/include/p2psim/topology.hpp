#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "p2psim/config.hpp"
#include "p2psim/sim_core.hpp"

namespace p2psim {

//! 1-based node identifier; node 1 is the measurement node.
using NodeId = std::uint32_t;

inline constexpr NodeId kMeasurementNode = 1;
inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

/**
 * Overlay built by a peer-selection strategy.
 *
 * out_peers(k) is the ordered outgoing list p_l of node k; neighbors(k) is
 * the sorted undirected union used for relaying.
 */
class OverlayGraph {
public:
    OverlayGraph() = default;
    explicit OverlayGraph(std::vector<std::vector<NodeId>> out_peers);

    std::size_t node_count() const { return out_.size(); }
    const std::vector<NodeId>& out_peers(NodeId k) const { return out_.at(k - 1); }
    const std::vector<NodeId>& neighbors(NodeId k) const { return adj_.at(k - 1); }
    std::size_t degree(NodeId k) const { return neighbors(k).size(); }

    bool connected() const;
    void write_edge_csv(std::ostream& os) const;

private:
    std::vector<std::vector<NodeId>> out_;
    std::vector<std::vector<NodeId>> adj_;
};

//! The P nodes following k on the ring, wrapping past C back to 1.
std::vector<NodeId> distance_peers(int peers, NodeId k, int node_count);

//! P distinct ids drawn uniformly without replacement from {1..C} \ {k}.
std::vector<NodeId> random_peers(int peers, NodeId k, int node_count, RngStream& rng);

//! distance_peers(P-1) plus one uniform pick outside k and those P-1.
std::vector<NodeId> mixed_peers(int peers, NodeId k, int node_count, RngStream& rng);

struct OverlayBuild {
    OverlayGraph graph;
    //! Whole-topology redraws caused by a disconnected draw.
    int rejected_draws{0};
};

OverlayBuild build_overlay(const Config& config, RngStream& rng);

//! BFS hop count over undirected edges; kUnreachable when no path exists.
std::size_t hop_distance(const OverlayGraph& g, NodeId a, NodeId b);

//! Hop counts from `source` to every node (index = NodeId, slot 0 unused).
std::vector<std::size_t> hop_distances_from(const OverlayGraph& g, NodeId source);

}  // namespace p2psim
