#include "p2psim/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p2psim {

std::string_view to_string(MessageKind kind)
{
    switch (kind) {
    case MessageKind::Inv: return "inv";
    case MessageKind::GetData: return "getdata";
    case MessageKind::TxPayload: return "tx";
    case MessageKind::BlockPayload: return "block";
    }
    return "?";
}

double serialization_delay(double size_bytes, double bandwidth_bps)
{
    return 8.0 * size_bytes / bandwidth_bps;
}

SimTime serialization_time(std::uint64_t size_bytes, double bandwidth_bps)
{
    if (std::isinf(bandwidth_bps)) return SimTime::zero();
    return SimTime{std::llround(8.0e9 * static_cast<double>(size_bytes) / bandwidth_bps)};
}

NetParams NetParams::from_config(const Config& c)
{
    return NetParams{c.bandwidth, c.mean_link_delay, c.link_delay_model, c.oracle_mode, c.msg_header_size,
                     c.inv_item_size};
}

std::uint32_t NetParams::inventory_size(std::size_t items) const
{
    return static_cast<std::uint32_t>(msg_header_size + inv_item_size * static_cast<int>(items));
}

SimTime NetParams::propagation_delay(MessageKind kind, RngStream& rng) const
{
    // In oracle mode the whole per-hop cost sits on the payload leg.
    if (oracle_mode && (kind == MessageKind::Inv || kind == MessageKind::GetData)) return SimTime::zero();
    if (delay_model == LinkDelayModel::fixed || mean_link_delay == 0.0) return SimTime::from_seconds(mean_link_delay);
    return SimTime::from_seconds(sample_exp(rng, mean_link_delay));
}

Transmission transmit(Link& link, const Message& msg, SimTime now, RngStream& rng, const NetParams& params)
{
    if (msg.src != link.src || msg.dst != link.dst) throw std::logic_error("transmit: message endpoints do not match link");
    const SimTime start = std::max(now, link.next_free);
    link.next_free = start + serialization_time(msg.body_size, params.bandwidth);
    return Transmission{link.next_free, link.next_free + params.propagation_delay(msg.kind, rng)};
}

}  // namespace p2psim
