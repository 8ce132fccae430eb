#include "p2psim/topology.hpp"

#include <algorithm>
#include <deque>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace p2psim {

OverlayGraph::OverlayGraph(std::vector<std::vector<NodeId>> out_peers) : out_(std::move(out_peers)), adj_(out_.size())
{
    const auto n = static_cast<NodeId>(out_.size());
    for (NodeId k = 1; k <= n; ++k) {
        for (NodeId l : out_[k - 1]) {
            if (l < 1 || l > n || l == k) throw std::invalid_argument("OverlayGraph: bad peer id");
            adj_[k - 1].push_back(l);
            adj_[l - 1].push_back(k);
        }
    }
    for (auto& list : adj_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
}

bool OverlayGraph::connected() const
{
    if (out_.empty()) return true;
    const auto dist = hop_distances_from(*this, 1);
    return std::none_of(dist.begin() + 1, dist.end(), [](std::size_t d) { return d == kUnreachable; });
}

void OverlayGraph::write_edge_csv(std::ostream& os) const
{
    os << "src,dst\n";
    for (NodeId k = 1; k <= out_.size(); ++k) {
        for (NodeId l : out_[k - 1]) os << k << ',' << l << '\n';
    }
}

namespace {
void check_peer_args(int peers, NodeId k, int node_count, int min_peers)
{
    if (node_count < 2) throw std::invalid_argument("peer selection: node_count must be at least 2");
    if (k < 1 || k > static_cast<NodeId>(node_count)) throw std::invalid_argument("peer selection: node id out of range");
    if (peers < min_peers) {
        throw std::invalid_argument("peer selection: need at least " + std::to_string(min_peers) + " peers");
    }
    if (peers >= node_count) throw std::invalid_argument("peer selection: peer count must be below node count");
}
}  // namespace

std::vector<NodeId> distance_peers(int peers, NodeId k, int node_count)
{
    check_peer_args(peers, k, node_count, 1);
    std::vector<NodeId> out;
    out.reserve(static_cast<std::size_t>(peers));
    const auto c = static_cast<NodeId>(node_count);
    for (NodeId i = 1; i <= static_cast<NodeId>(peers); ++i) out.push_back((k + i - 1) % c + 1);
    return out;
}

std::vector<NodeId> random_peers(int peers, NodeId k, int node_count, RngStream& rng)
{
    check_peer_args(peers, k, node_count, 1);
    std::vector<NodeId> pool;
    pool.reserve(static_cast<std::size_t>(node_count - 1));
    for (NodeId id = 1; id <= static_cast<NodeId>(node_count); ++id) {
        if (id != k) pool.push_back(id);
    }
    // Partial Fisher-Yates: slot i receives a uniform pick from what is left.
    for (std::size_t i = 0; i < static_cast<std::size_t>(peers); ++i) {
        const std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(peers));
    return pool;
}

std::vector<NodeId> mixed_peers(int peers, NodeId k, int node_count, RngStream& rng)
{
    check_peer_args(peers, k, node_count, 2);
    std::vector<NodeId> out = distance_peers(peers - 1, k, node_count);
    std::vector<NodeId> pool;
    for (NodeId id = 1; id <= static_cast<NodeId>(node_count); ++id) {
        if (id != k && std::find(out.begin(), out.end(), id) == out.end()) pool.push_back(id);
    }
    out.push_back(pool[rng.uniform_index(pool.size())]);
    return out;
}

OverlayBuild build_overlay(const Config& config, RngStream& rng)
{
    const int c = config.node_count;
    const int p = config.peer_count;
    OverlayBuild result;
    for (;;) {
        std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(c));
        for (NodeId k = 1; k <= static_cast<NodeId>(c); ++k) {
            switch (config.strategy) {
            case Strategy::normal: out[k - 1] = distance_peers(p, k, c); break;
            case Strategy::random: out[k - 1] = random_peers(p, k, c, rng); break;
            case Strategy::mixed: out[k - 1] = mixed_peers(p, k, c, rng); break;
            }
        }
        result.graph = OverlayGraph(std::move(out));
        if (result.graph.connected()) return result;
        ++result.rejected_draws;
        std::clog << "topology: disconnected " << to_string(config.strategy) << " draw rejected, redrawing\n";
        if (result.rejected_draws > 10000) throw std::runtime_error("build_overlay: could not draw a connected overlay");
    }
}

std::vector<std::size_t> hop_distances_from(const OverlayGraph& g, NodeId source)
{
    std::vector<std::size_t> dist(g.node_count() + 1, kUnreachable);
    std::deque<NodeId> frontier{source};
    dist[source] = 0;
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop_front();
        for (NodeId v : g.neighbors(u)) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                frontier.push_back(v);
            }
        }
    }
    return dist;
}

std::size_t hop_distance(const OverlayGraph& g, NodeId a, NodeId b)
{
    if (a < 1 || b < 1 || a > g.node_count() || b > g.node_count()) {
        throw std::invalid_argument("hop_distance: node id out of range");
    }
    return hop_distances_from(g, a)[b];
}

}  // namespace p2psim
