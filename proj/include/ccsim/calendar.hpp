#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/time.hpp"

namespace ccsim {

enum class ConflictKind { DoubleBooking, ResourceShortage };

struct ConflictResolution {
    enum class Kind { Rescheduled, Queued } kind = Kind::Rescheduled;
    SimTime new_start; // meaningful for Rescheduled only
};

/// A detected scheduling collision together with how it was resolved.
struct ConflictReport {
    ConflictKind kind = ConflictKind::DoubleBooking;
    std::vector<std::uint64_t> events; // colliding identifiers
    ConflictResolution resolution;
};

/// Committed, per-resource, non-overlapping appointment intervals.
class BookingCalendar {
public:
    struct Booking {
        std::uint64_t booking_id = 0;
        SimTime start;
        double duration_s = 0.0;
        double end_s() const { return start.seconds() + duration_s; }
    };

    struct Candidate {
        std::string resource;
        std::uint64_t booking_id = 0;
        SimTime start;
        double duration_s = 0.0;
    };

    /// DoubleBooking report when the candidate overlaps a committed interval
    /// on the same resource; resolution is the earliest non-overlapping start
    /// at or after the requested one. No report means the slot is free.
    std::optional<ConflictReport> detect_conflict(const Candidate& candidate) const;

    /// Commit the candidate, rescheduling it first if it collides. Returns the
    /// committed booking plus the conflict report, if any.
    std::pair<Booking, std::optional<ConflictReport>> commit(const Candidate& candidate);

    const std::vector<Booking>& bookings(const std::string& resource) const;

    /// True iff no resource holds two overlapping committed intervals.
    bool overlap_free() const;

private:
    std::map<std::string, std::vector<Booking>> byresource_;
};

} // namespace ccsim
