#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "ccsim/error.hpp"
#include "ccsim/event.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

enum class CancelResult { Cancelled, AlreadyDispatched };

/// Deterministic discrete-event engine: a nondecreasing clock plus a priority
/// queue dispatching events in (time, priority, seq) order. One engine owns one
/// run; instances share nothing and may run on different threads.
class Engine {
public:
    Engine();

    /// Queue an event at or after the current clock. Fills id and seq.
    EventHandle schedule(Event event);

    EventHandle schedule(SimTime time, EventKind kind, std::string target,
                         std::uint64_t aux = 0, int priority = -1);

    /// Cancel a live event. Terminal and idempotent: a second cancel (or a
    /// cancel after dispatch) reports AlreadyDispatched.
    CancelResult cancel(const EventHandle& handle);

    /// Dispatch the minimum live event and advance the clock to its time.
    /// Empty queue is a normal nullopt return.
    std::optional<Event> step();

    /// Dispatch everything with time <= t, in total order. Returns the count.
    std::size_t run_until(SimTime t);

    /// Time of the next live event, if any.
    std::optional<SimTime> peek_time();

    SimTime now() const { return clock_; }
    std::uint64_t run_id() const { return run_id_; }

    std::uint64_t scheduled_count() const { return scheduled_; }
    std::uint64_t dispatched_count() const { return dispatched_; }
    std::uint64_t cancelled_count() const { return cancelled_count_; }
    std::uint64_t live_count() const { return scheduled_ - dispatched_ - cancelled_count_; }

    /// Called once per dispatched event, before the event is handed back.
    void set_trace_sink(std::function<void(const Event&)> sink) { trace_ = std::move(sink); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return b.time < a.time;
            if (a.priority != b.priority) return b.priority < a.priority;
            return b.seq < a.seq;
        }
    };

    void drop_cancelled_head();

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::unordered_set<EventId> live_;
    std::unordered_set<EventId> cancelled_;
    SimTime clock_;
    std::uint64_t run_id_;
    EventId next_id_ = 1;
    std::uint64_t next_seq_ = 1;
    std::uint64_t scheduled_ = 0;
    std::uint64_t dispatched_ = 0;
    std::uint64_t cancelled_count_ = 0;
    std::function<void(const Event&)> trace_;
};

} // namespace ccsim
