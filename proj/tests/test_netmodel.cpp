#include <doctest.h>

#include <cmath>
#include <limits>

#include "p2psim/netmodel.hpp"

using namespace p2psim;

namespace {

Message msg(MessageKind kind, std::uint32_t size, NodeId src = 1, NodeId dst = 2)
{
    Message m;
    m.kind = kind;
    m.items.push_back(InvItem{ItemType::Tx, 0});
    m.body_size = size;
    m.src = src;
    m.dst = dst;
    return m;
}

NetParams params(double bw, double delay, LinkDelayModel model = LinkDelayModel::exponential)
{
    NetParams p;
    p.bandwidth = bw;
    p.mean_link_delay = delay;
    p.delay_model = model;
    return p;
}

}  // namespace

TEST_SUITE("netmodel") {

TEST_CASE("serialization arithmetic")
{
    CHECK(serialization_delay(1'250'000, 10e6) == doctest::Approx(1.0));
    CHECK(serialization_delay(500, 10e6) == doctest::Approx(0.0004));
    CHECK(serialization_delay(777, 20e6) == doctest::Approx(serialization_delay(777, 10e6) / 2));
    CHECK(serialization_time(500, 10e6).ns == 400'000);
    CHECK(serialization_time(500, std::numeric_limits<double>::infinity()).ns == 0);
}

TEST_CASE("message sizes")
{
    NetParams p;
    CHECK(p.inventory_size(1) == 85);
    CHECK(p.inventory_size(3) == 24 + 3 * 61);
}

TEST_CASE("idle link: delivery = now + serialization + drawn delay")
{
    const NetParams p = params(10e6, 0.011);
    Link link{1, 2, {}};
    RngStream rng(5, "node-1-link"), twin(5, "node-1-link");
    const SimTime now = SimTime::from_seconds(3.0);
    const Transmission t = transmit(link, msg(MessageKind::TxPayload, 500), now, rng, p);
    const double d = sample_exp(twin, 0.011);
    CHECK(t.serialization_done == now + SimTime{400'000});
    CHECK(link.next_free == t.serialization_done);
    // Delivery is kept in whole nanoseconds.
    CHECK(std::abs(t.delivery.seconds() - (3.0 + 0.0004 + d)) <= 1e-9);
}

TEST_CASE("back-to-back messages queue FIFO on the serializer")
{
    const NetParams p = params(10e6, 0.011);
    Link link{1, 2, {}};
    RngStream rng(1, "l");
    const SimTime now = SimTime::from_seconds(1.0);
    const SimTime s = serialization_time(1'250'000, 10e6);
    const auto a = transmit(link, msg(MessageKind::BlockPayload, 1'250'000), now, rng, p);
    const auto b = transmit(link, msg(MessageKind::BlockPayload, 1'250'000), now, rng, p);
    CHECK(a.serialization_done == now + s);
    CHECK(b.serialization_done == now + s + s);

    // Serialization never overtakes, even with arbitrary sizes and send times.
    Link l2{1, 2, {}};
    SimTime t{};
    SimTime last_done{};
    for (int i = 0; i < 1000; ++i) {
        t += SimTime{static_cast<std::int64_t>(rng.uniform_index(2'000'000))};
        const auto tr = transmit(l2, msg(MessageKind::TxPayload, 1 + static_cast<std::uint32_t>(rng.uniform_index(5000))), t, rng, p);
        CHECK(tr.serialization_done >= last_done);
        CHECK(tr.serialization_done > t);
        CHECK(tr.delivery >= tr.serialization_done);
        last_done = tr.serialization_done;
    }
}

TEST_CASE("zero delay and infinite bandwidth deliver at now")
{
    const NetParams p = params(std::numeric_limits<double>::infinity(), 0.0, LinkDelayModel::fixed);
    Link link{1, 2, SimTime{}};
    RngStream rng(1, "l");
    const SimTime now = SimTime::from_seconds(42.0);
    CHECK(transmit(link, msg(MessageKind::BlockPayload, 1'000'000), now, rng, p).delivery == now);
}

TEST_CASE("oracle mode: inventory traffic is free, payloads take the hop delay")
{
    NetParams p = params(std::numeric_limits<double>::infinity(), 1.0, LinkDelayModel::fixed);
    p.oracle_mode = true;
    RngStream rng(1, "l");
    CHECK(p.propagation_delay(MessageKind::Inv, rng).ns == 0);
    CHECK(p.propagation_delay(MessageKind::GetData, rng).ns == 0);
    CHECK(p.propagation_delay(MessageKind::TxPayload, rng) == SimTime::from_seconds(1.0));
    CHECK(p.propagation_delay(MessageKind::BlockPayload, rng) == SimTime::from_seconds(1.0));
}

TEST_CASE("mean propagation component over 10000 messages within 3%")
{
    const NetParams p = params(10e6, 0.011);
    RngStream rng(77, "node-3-link");
    double sum = 0;
    for (int i = 0; i < 10000; ++i) sum += p.propagation_delay(MessageKind::Inv, rng).seconds();
    CHECK(std::abs(sum / 10000 - 0.011) < 0.03 * 0.011);
}

TEST_CASE("endpoint mismatch is rejected")
{
    const NetParams p = params(10e6, 0.011);
    Link link{1, 2, {}};
    RngStream rng(1, "l");
    CHECK_THROWS(transmit(link, msg(MessageKind::Inv, 85, 2, 1), SimTime{}, rng, p));
}

}
