#pragma once

#include <cstdint>
#include <string>

#include "ccsim/time.hpp"

namespace ccsim {

using EventId = std::uint64_t;

enum class EventKind : std::uint8_t {
    CaseArrival,
    RequestDelivered,
    ContributionSubmitted,
    ValidationCompleted,
    MergeCompleted,
    ResourceFreed,
    SyncTick,
    AppointmentStart,
    AppointmentEnd,
    StageCompleted,
};

const char* event_kind_name(EventKind kind);

/// Default dispatch priority per kind: 0 most urgent, 9 least, 5 the default.
/// Validation and merge events run ahead of routine traffic at equal times.
int default_priority(EventKind kind);

constexpr int kMinPriority = 0;
constexpr int kMaxPriority = 9;

/// One scheduled unit of simulated work. (time, priority, seq) totally orders
/// live events; id is unique for the life of a run.
struct Event {
    EventId id = 0;
    SimTime time;
    int priority = 5;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::CaseArrival;
    std::string target;
    std::uint64_t aux = 0; // kind-specific payload id (contribution, grant, ...)
};

/// Returned by Engine::schedule; only valid for cancellation on the issuing run.
struct EventHandle {
    std::uint64_t run_id = 0;
    EventId event_id = 0;
};

} // namespace ccsim
