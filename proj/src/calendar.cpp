#include "ccsim/calendar.hpp"

#include <algorithm>

namespace ccsim {

namespace {

bool overlaps(double a0, double a1, double b0, double b1) {
    return a0 < b1 && b0 < a1;
}

/// Earliest start >= requested whose interval clears every committed booking.
/// Bookings are kept sorted by start, so one forward pass settles it.
SimTime earliest_fit(const std::vector<BookingCalendar::Booking>& sorted, SimTime requested,
                     double duration_s, std::vector<std::uint64_t>* collided) {
    double s = requested.seconds();
    for (const auto& b : sorted) {
        if (overlaps(s, s + duration_s, b.start.seconds(), b.end_s())) {
            if (collided) collided->push_back(b.booking_id);
            s = b.end_s();
        }
    }
    return SimTime(s);
}

} // namespace

std::optional<ConflictReport> BookingCalendar::detect_conflict(const Candidate& candidate) const {
    auto it = byresource_.find(candidate.resource);
    if (it == byresource_.end()) return std::nullopt;

    std::vector<std::uint64_t> collided;
    SimTime fit = earliest_fit(it->second, candidate.start, candidate.duration_s, &collided);
    if (collided.empty()) return std::nullopt;

    ConflictReport report;
    report.kind = ConflictKind::DoubleBooking;
    report.events.push_back(candidate.booking_id);
    report.events.insert(report.events.end(), collided.begin(), collided.end());
    report.resolution.kind = ConflictResolution::Kind::Rescheduled;
    report.resolution.new_start = fit;
    return report;
}

std::pair<BookingCalendar::Booking, std::optional<ConflictReport>>
BookingCalendar::commit(const Candidate& candidate) {
    auto report = detect_conflict(candidate);
    Booking booking;
    booking.booking_id = candidate.booking_id;
    booking.start = report ? report->resolution.new_start : candidate.start;
    booking.duration_s = candidate.duration_s;

    auto& slots = byresource_[candidate.resource];
    auto pos = std::upper_bound(slots.begin(), slots.end(), booking,
                                [](const Booking& a, const Booking& b) { return a.start < b.start; });
    slots.insert(pos, booking);
    return {booking, report};
}

const std::vector<BookingCalendar::Booking>&
BookingCalendar::bookings(const std::string& resource) const {
    static const std::vector<Booking> empty;
    auto it = byresource_.find(resource);
    return it == byresource_.end() ? empty : it->second;
}

bool BookingCalendar::overlap_free() const {
    for (const auto& [resource, slots] : byresource_) {
        for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
            if (slots[i].end_s() > slots[i + 1].start.seconds()) return false;
        }
    }
    return true;
}

} // namespace ccsim
