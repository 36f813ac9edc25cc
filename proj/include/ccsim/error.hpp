#pragma once

#include <stdexcept>
#include <string>

namespace ccsim {

enum class ErrorCode {
    // engine
    SchedulingInPast,
    HorizonBehindClock,
    UnknownHandle,
    // case record
    EmptyEnrollment,
    AccessDenied,
    UnknownCase,
    UnknownContribution,
    UnknownSubject,
    NotPending,
    NotCaseManager,
    NotFlagged,
    NotAuthor,
    NotApproved,
    // collaboration
    TerminalStage,
    NotAssessed,
    NoCaseManagerInPool,
    EmptyPool,
    InvalidTransitionTable,
    // resources
    UnitsExceedCapacity,
    AlreadyReleased,
    RunNotFinished,
    UnknownResource,
    // scenario / config
    UnknownParameter,
    ParseError,
    ValidationError,
    MissingUnit,
};

const char* error_code_name(ErrorCode code);

/// The one exception type used across the simulator; tests match on code().
class SimError : public std::runtime_error {
public:
    SimError(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace ccsim
