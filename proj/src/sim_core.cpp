#include "p2psim/sim_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace p2psim {

SimTime SimTime::from_seconds(double s)
{
    if (!std::isfinite(s) || s < 0) throw std::invalid_argument("SimTime: seconds must be finite and non-negative");
    return SimTime{std::llround(s * 1e9)};
}

std::string format_seconds(SimTime t)
{
    const bool neg = t.ns < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(t.ns + 1)) + 1 : static_cast<std::uint64_t>(t.ns);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%llu.%09llu", neg ? "-" : "", static_cast<unsigned long long>(mag / 1000000000ULL),
                  static_cast<unsigned long long>(mag % 1000000000ULL));
    return buf;
}

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::GenerateTx: return "GenerateTx";
    case EventKind::GenerateBlock: return "GenerateBlock";
    case EventKind::MsgDelivery: return "MsgDelivery";
    case EventKind::ValidationDone: return "ValidationDone";
    }
    return "?";
}

namespace {
// std::push_heap builds a max-heap, so the comparator is inverted.
struct Later {
    bool operator()(const Event& a, const Event& b) const { return event_before(b, a); }
};
}  // namespace

void EventQueue::push(const Event& ev)
{
    if (ev.time < now_) {
        throw std::logic_error("EventQueue: event scheduled in the past (t=" + format_seconds(ev.time) +
                               " < now=" + format_seconds(now_) + ")");
    }
    heap_.push_back(ev);
    std::push_heap(heap_.begin(), heap_.end(), Later{});
    next_seq_ = std::max(next_seq_, ev.seq + 1);
}

std::uint64_t EventQueue::schedule(SimTime time, EventKind kind, std::uint32_t node, std::uint32_t ref)
{
    const std::uint64_t seq = next_seq_;
    push(Event{time, seq, kind, node, ref});
    return seq;
}

Event EventQueue::pop()
{
    if (heap_.empty()) throw std::logic_error("EventQueue: pop on empty queue");
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Event ev = heap_.back();
    heap_.pop_back();
    now_ = ev.time;
    ++processed_;
    return ev;
}

std::uint64_t fnv1a64(std::string_view s)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::string_view stream_id) : id_(stream_id)
{
    const std::uint64_t label = fnv1a64(stream_id);
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(label), static_cast<std::uint32_t>(label >> 32)};
    engine_.seed(seq);
}

double RngStream::uniform_open0()
{
    // (k + 1) / 2^53 for k in [0, 2^53).
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RngStream::uniform_index(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("RngStream::uniform_index: empty range");
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t bound = (UINT64_MAX / n) * n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x < bound) return x % n;
    }
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi)
{
    if (hi < lo) throw std::invalid_argument("RngStream::uniform_int: hi < lo");
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
}

double exp_from_uniform(double u, double mean)
{
    // -0.0 would print oddly; u == 1 maps to +0.
    const double v = -mean * std::log(u);
    return v == 0.0 ? 0.0 : v;
}

double sample_exp(RngStream& stream, double mean)
{
    if (!(mean > 0)) throw std::invalid_argument("sample_exp: mean must be positive");
    return exp_from_uniform(stream.uniform_open0(), mean);
}

}  // namespace p2psim
