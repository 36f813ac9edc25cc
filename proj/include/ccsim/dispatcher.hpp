#pragma once

#include <cstddef>
#include <functional>
#include <unordered_map>
#include <utility>

#include "ccsim/engine.hpp"

namespace ccsim {

/// Thin action layer over the data-only Engine: couples each scheduled event
/// to the callback that reacts when it fires. Everything that mutates model
/// state during a run happens inside these callbacks, on the engine's thread.
class Dispatcher {
public:
    using Action = std::function<void(const Event&)>;

    explicit Dispatcher(Engine& engine) : engine_(engine) {}

    EventHandle schedule(SimTime time, EventKind kind, std::string target,
                         std::uint64_t aux, Action action, int priority = -1) {
        EventHandle h = engine_.schedule(time, kind, std::move(target), aux, priority);
        if (action) actions_.emplace(h.event_id, std::move(action));
        return h;
    }

    CancelResult cancel(const EventHandle& handle) {
        CancelResult r = engine_.cancel(handle);
        if (r == CancelResult::Cancelled) actions_.erase(handle.event_id);
        return r;
    }

    /// Dispatch the next event and run its action. False when the queue is empty.
    bool step() {
        auto ev = engine_.step();
        if (!ev) return false;
        run_action(*ev);
        return true;
    }

    /// Dispatch all events with time <= t, running each action in order.
    std::size_t run_until(SimTime t) {
        if (t < engine_.now())
            throw SimError(ErrorCode::HorizonBehindClock, "horizon behind clock");
        std::size_t n = 0;
        while (auto next = engine_.peek_time()) {
            if (*next > t) break;
            auto ev = engine_.step();
            run_action(*ev);
            ++n;
        }
        return n;
    }

    Engine& engine() { return engine_; }
    SimTime now() const { return engine_.now(); }

private:
    void run_action(const Event& ev) {
        auto it = actions_.find(ev.id);
        if (it == actions_.end()) return;
        Action action = std::move(it->second);
        actions_.erase(it);
        action(ev);
    }

    Engine& engine_;
    std::unordered_map<EventId, Action> actions_;
};

} // namespace ccsim
