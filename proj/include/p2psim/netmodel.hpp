#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "p2psim/config.hpp"
#include "p2psim/sim_core.hpp"
#include "p2psim/topology.hpp"

namespace p2psim {

using TxId = std::uint32_t;
using BlockId = std::uint32_t;

enum class MessageKind : std::uint8_t { Inv, GetData, TxPayload, BlockPayload };
enum class ItemType : std::uint8_t { Tx, Block };

std::string_view to_string(MessageKind kind);

struct InvItem {
    ItemType type{ItemType::Tx};
    std::uint32_t id{0};

    friend bool operator==(const InvItem&, const InvItem&) = default;
};

//! Inventory list; announcements and most requests carry a single entry.
using InvList = boost::container::small_vector<InvItem, 2>;

struct Message {
    MessageKind kind{MessageKind::Inv};
    //! Inventory entries for Inv/GetData; the single carried object for payloads.
    InvList items;
    std::uint32_t body_size{0};
    NodeId src{0};
    NodeId dst{0};
    SimTime send_time{};
};

//! Directed link state: the serializer is busy until next_free.
struct Link {
    NodeId src{0};
    NodeId dst{0};
    SimTime next_free{};
};

//! 8 * size / bandwidth, in seconds.
double serialization_delay(double size_bytes, double bandwidth_bps);

//! serialization_delay rounded to whole nanoseconds; zero for infinite bandwidth.
SimTime serialization_time(std::uint64_t size_bytes, double bandwidth_bps);

//! Link-level knobs taken from Config.
struct NetParams {
    double bandwidth{10e6};
    double mean_link_delay{0.011};
    LinkDelayModel delay_model{LinkDelayModel::exponential};
    bool oracle_mode{false};
    int msg_header_size{24};
    int inv_item_size{61};

    static NetParams from_config(const Config& c);

    //! Wire size of an Inv/GetData carrying `items` entries.
    std::uint32_t inventory_size(std::size_t items) const;

    //! Propagation component for one message of the given kind.
    SimTime propagation_delay(MessageKind kind, RngStream& rng) const;
};

struct Transmission {
    SimTime serialization_done;
    SimTime delivery;
};

/**
 * Put `msg` on `link` at `now`. Serialization starts when the link is free
 * (FIFO), then a per-message propagation delay is added.
 */
Transmission transmit(Link& link, const Message& msg, SimTime now, RngStream& rng, const NetParams& params);

}  // namespace p2psim
