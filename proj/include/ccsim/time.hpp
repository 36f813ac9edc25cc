#pragma once

#include <cassert>
#include <compare>
#include <cstdio>
#include <string>

namespace ccsim {

/// Simulated time: seconds since run start, fractional allowed, never negative.
class SimTime {
public:
    constexpr SimTime() = default;
    constexpr explicit SimTime(double seconds) : seconds_(seconds) {
        assert(seconds_ >= 0.0);
    }

    constexpr double seconds() const { return seconds_; }

    auto operator<=>(const SimTime&) const = default;

    SimTime operator+(double secs) const { return SimTime(seconds_ + secs); }

    /// Elapsed seconds from `earlier` to this instant.
    double operator-(const SimTime& earlier) const { return seconds_ - earlier.seconds_; }

private:
    double seconds_ = 0.0;
};

/// Fixed three-decimal rendering, shared by the trace and sample exports.
inline std::string format_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", s);
    return buf;
}

inline std::string format_seconds(SimTime t) { return format_seconds(t.seconds()); }

constexpr double kSecondsPerMinute = 60.0;
constexpr double kSecondsPerHour = 3600.0;
constexpr double kSecondsPerDay = 86400.0;

} // namespace ccsim
