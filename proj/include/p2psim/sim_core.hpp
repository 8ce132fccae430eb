#pragma once

#include <cstdint>
#include <compare>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace p2psim {

//! Simulated time in integer nanoseconds since simulation start.
struct SimTime {
    std::int64_t ns{0};

    static constexpr SimTime zero() { return SimTime{0}; }
    static constexpr SimTime max() { return SimTime{INT64_MAX}; }
    static SimTime from_seconds(double s);

    double seconds() const { return static_cast<double>(ns) / 1e9; }

    friend constexpr auto operator<=>(SimTime, SimTime) = default;
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.ns + b.ns}; }
    friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.ns - b.ns}; }
    SimTime& operator+=(SimTime o)
    {
        ns += o.ns;
        return *this;
    }
};

//! Fixed-point decimal seconds with nanosecond precision, e.g. "12.500000000".
std::string format_seconds(SimTime t);

enum class EventKind : std::uint8_t { GenerateTx, GenerateBlock, MsgDelivery, ValidationDone };

std::string_view to_string(EventKind kind);

struct Event {
    SimTime time;
    std::uint64_t seq{0};
    EventKind kind{EventKind::GenerateTx};
    std::uint32_t node{0};
    //! Kind-specific payload handle (message slot for deliveries, unused otherwise).
    std::uint32_t ref{0};
};

//! Strict total order on (time, seq); the earliest event compares smallest.
inline bool event_before(const Event& a, const Event& b)
{
    if (a.time != b.time) return a.time < b.time;
    return a.seq < b.seq;
}

/**
 * Min-heap of pending events with a monotone virtual clock.
 *
 * Events pop in (time, seq) order. Scheduling an event earlier than the
 * current clock throws std::logic_error.
 */
class EventQueue {
public:
    SimTime now() const { return now_; }
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }
    std::uint64_t processed() const { return processed_; }

    //! Insert an event carrying a caller-chosen seq.
    void push(const Event& ev);

    //! Insert an event stamped with the next global seq; returns that seq.
    std::uint64_t schedule(SimTime time, EventKind kind, std::uint32_t node, std::uint32_t ref = 0);

    const Event& top() const { return heap_.front(); }

    //! Remove the earliest event and advance the clock to its time.
    Event pop();

    /**
     * Process every event with time <= horizon in (time, seq) order; the
     * handler may schedule further events. The clock ends at the horizon
     * (or stays put if it is already past it).
     */
    template <typename Handler>
    void run_until(SimTime horizon, Handler&& handler)
    {
        while (!heap_.empty() && heap_.front().time <= horizon) {
            handler(pop());
        }
        if (now_ < horizon) now_ = horizon;
    }

    //! Process events until none remain.
    template <typename Handler>
    void drain(Handler&& handler)
    {
        while (!heap_.empty()) handler(pop());
    }

private:
    std::vector<Event> heap_;
    SimTime now_{};
    std::uint64_t next_seq_{0};
    std::uint64_t processed_{0};
};

/**
 * Named random stream. The generator state is derived from
 * (master_seed, stream_id) only, so streams are reproducible and do not
 * perturb each other.
 */
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string_view stream_id);

    const std::string& id() const { return id_; }

    std::uint64_t next_u64() { return engine_(); }

    //! Uniform on (0, 1] with 53-bit resolution.
    double uniform_open0();

    //! Uniform integer in [0, n), unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    //! Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::string id_;
    std::mt19937_64 engine_;
};

//! -mean * ln(u); u is expected on (0, 1].
double exp_from_uniform(double u, double mean);

//! Exponential variate with the given mean (seconds). Throws on mean <= 0.
double sample_exp(RngStream& stream, double mean);

//! 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

//! SplitMix64 finalizer; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

}  // namespace p2psim
