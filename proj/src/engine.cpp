#include "ccsim/engine.hpp"

#include <atomic>

namespace ccsim {

namespace {
std::atomic<std::uint64_t> g_next_run_id{1};
} // namespace

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::CaseArrival: return "CaseArrival";
        case EventKind::RequestDelivered: return "RequestDelivered";
        case EventKind::ContributionSubmitted: return "ContributionSubmitted";
        case EventKind::ValidationCompleted: return "ValidationCompleted";
        case EventKind::MergeCompleted: return "MergeCompleted";
        case EventKind::ResourceFreed: return "ResourceFreed";
        case EventKind::SyncTick: return "SyncTick";
        case EventKind::AppointmentStart: return "AppointmentStart";
        case EventKind::AppointmentEnd: return "AppointmentEnd";
        case EventKind::StageCompleted: return "StageCompleted";
    }
    return "?";
}

int default_priority(EventKind kind) {
    switch (kind) {
        case EventKind::ValidationCompleted:
        case EventKind::MergeCompleted:
            return 3;
        default:
            return 5;
    }
}

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SchedulingInPast: return "SchedulingInPast";
        case ErrorCode::HorizonBehindClock: return "HorizonBehindClock";
        case ErrorCode::UnknownHandle: return "UnknownHandle";
        case ErrorCode::EmptyEnrollment: return "EmptyEnrollment";
        case ErrorCode::AccessDenied: return "AccessDenied";
        case ErrorCode::UnknownCase: return "UnknownCase";
        case ErrorCode::UnknownContribution: return "UnknownContribution";
        case ErrorCode::UnknownSubject: return "UnknownSubject";
        case ErrorCode::NotPending: return "NotPending";
        case ErrorCode::NotCaseManager: return "NotCaseManager";
        case ErrorCode::NotFlagged: return "NotFlagged";
        case ErrorCode::NotAuthor: return "NotAuthor";
        case ErrorCode::NotApproved: return "NotApproved";
        case ErrorCode::TerminalStage: return "TerminalStage";
        case ErrorCode::NotAssessed: return "NotAssessed";
        case ErrorCode::NoCaseManagerInPool: return "NoCaseManagerInPool";
        case ErrorCode::EmptyPool: return "EmptyPool";
        case ErrorCode::InvalidTransitionTable: return "InvalidTransitionTable";
        case ErrorCode::UnitsExceedCapacity: return "UnitsExceedCapacity";
        case ErrorCode::AlreadyReleased: return "AlreadyReleased";
        case ErrorCode::RunNotFinished: return "RunNotFinished";
        case ErrorCode::UnknownResource: return "UnknownResource";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::MissingUnit: return "MissingUnit";
    }
    return "?";
}

Engine::Engine() : run_id_(g_next_run_id.fetch_add(1)) {}

EventHandle Engine::schedule(Event event) {
    if (event.time < clock_)
        throw SimError(ErrorCode::SchedulingInPast,
                       "event at " + format_seconds(event.time) + " behind clock " +
                           format_seconds(clock_));
    if (event.priority < kMinPriority || event.priority > kMaxPriority)
        event.priority = default_priority(event.kind);
    event.id = next_id_++;
    event.seq = next_seq_++;
    live_.insert(event.id);
    ++scheduled_;
    EventHandle handle{run_id_, event.id};
    queue_.push(std::move(event));
    return handle;
}

EventHandle Engine::schedule(SimTime time, EventKind kind, std::string target,
                             std::uint64_t aux, int priority) {
    Event ev;
    ev.time = time;
    ev.kind = kind;
    ev.target = std::move(target);
    ev.aux = aux;
    ev.priority = priority < 0 ? default_priority(kind) : priority;
    return schedule(std::move(ev));
}

CancelResult Engine::cancel(const EventHandle& handle) {
    if (handle.run_id != run_id_ || handle.event_id == 0 || handle.event_id >= next_id_)
        throw SimError(ErrorCode::UnknownHandle, "handle not issued by this run");
    auto it = live_.find(handle.event_id);
    if (it == live_.end()) return CancelResult::AlreadyDispatched;
    live_.erase(it);
    cancelled_.insert(handle.event_id);
    ++cancelled_count_;
    return CancelResult::Cancelled;
}

void Engine::drop_cancelled_head() {
    while (!queue_.empty() && cancelled_.count(queue_.top().id)) {
        cancelled_.erase(queue_.top().id);
        queue_.pop();
    }
}

std::optional<Event> Engine::step() {
    drop_cancelled_head();
    if (queue_.empty()) return std::nullopt;
    Event ev = queue_.top();
    queue_.pop();
    live_.erase(ev.id);
    ++dispatched_;
    clock_ = ev.time;
    if (trace_) trace_(ev);
    return ev;
}

std::optional<SimTime> Engine::peek_time() {
    drop_cancelled_head();
    if (queue_.empty()) return std::nullopt;
    return queue_.top().time;
}

std::size_t Engine::run_until(SimTime t) {
    if (t < clock_)
        throw SimError(ErrorCode::HorizonBehindClock,
                       "horizon " + format_seconds(t) + " behind clock " + format_seconds(clock_));
    std::size_t n = 0;
    while (auto next = peek_time()) {
        if (*next > t) break;
        step();
        ++n;
    }
    return n;
}

} // namespace ccsim
