#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/dispatcher.hpp"

namespace ccsim {

enum class ResourceKind : std::uint8_t { Personnel, Facility, Equipment };

const char* resource_kind_name(ResourceKind kind);
std::optional<ResourceKind> resource_kind_from_name(const std::string& name);

/// End-of-run usage summary for one resource.
struct UtilizationRecord {
    std::string resource_id;
    double busy_time_s = 0.0; // unit-seconds integrated over the run
    double horizon_s = 0.0;
    double utilization = 0.0; // busy_time / (capacity * horizon)
    std::size_t max_queue_len = 0;
    double mean_wait_s = 0.0; // averaged over requests that had to queue
};

/// Finite-capacity resources with FIFO queued grants. Releases happen either
/// explicitly or through the scheduled end-of-hold event; each release promotes
/// the queue head at the same timestamp when it fits.
class ResourcePool {
public:
    /// Notified the moment a ticket's units are actually granted.
    using GrantCallback = std::function<void(std::uint64_t ticket, SimTime granted_at)>;

    struct Ticket {
        std::uint64_t id = 0;
        bool granted = false;
        std::size_t position = 0; // 1-based queue position when not granted
    };

    /// Full per-ticket trace, the raw material for usage audits.
    struct GrantRecord {
        std::uint64_t ticket = 0;
        std::string resource;
        std::string holder;
        int units = 0;
        double requested_at = 0.0;
        double granted_at = -1.0;  // -1 while still queued
        double released_at = -1.0; // -1 while still held
        bool waited = false;
    };

    explicit ResourcePool(Dispatcher& bus) : bus_(bus) {}

    void add_resource(const std::string& name, ResourceKind kind, int capacity);
    bool has_resource(const std::string& name) const { return resources_.count(name) > 0; }

    Ticket request(const std::string& resource, int units, const std::string& holder,
                   double duration_s, SimTime now, GrantCallback on_grant = nullptr);
    void release(std::uint64_t ticket, SimTime now);

    int capacity(const std::string& resource) const;
    int in_use(const std::string& resource) const;
    std::size_t queue_len(const std::string& resource) const;

    /// Integrates every resource's usage out to the horizon and closes the
    /// books; reports are only available afterwards.
    void finish(SimTime horizon);
    bool finished() const { return finished_; }
    UtilizationRecord utilization_report(const std::string& resource) const;
    std::vector<UtilizationRecord> all_reports() const;

    const std::vector<GrantRecord>& grant_log() const { return log_; }

    /// Resources running hot: utilization at or above the threshold, or a
    /// queue was seen and the mean wait exceeds the ceiling.
    static std::vector<std::string> detect_bottlenecks(const std::vector<UtilizationRecord>& records,
                                                       double threshold, double wait_ceiling_s);

private:
    struct Waiting {
        std::uint64_t ticket = 0;
        int units = 0;
        double duration_s = 0.0;
        GrantCallback on_grant;
    };

    struct Resource {
        std::string name;
        ResourceKind kind = ResourceKind::Personnel;
        int capacity = 0;
        int in_use = 0;
        std::deque<Waiting> wait_queue;
        double busy_time_s = 0.0;
        double last_change_s = 0.0;
        std::size_t max_queue = 0;
        std::vector<double> waits_s;
    };

    enum class TicketState { Queued, Active, Released };

    struct TicketInfo {
        std::string resource;
        int units = 0;
        TicketState state = TicketState::Queued;
        std::size_t log_index = 0;
    };

    Resource& require(const std::string& name);
    const Resource& require(const std::string& name) const;
    void integrate(Resource& r, double now_s);
    void grant_now(Resource& r, std::uint64_t ticket, int units, double duration_s, SimTime now,
                   const GrantCallback& on_grant, bool from_queue);
    void release_units(std::uint64_t ticket, SimTime now);

    Dispatcher& bus_;
    std::map<std::string, Resource> resources_;
    std::map<std::uint64_t, TicketInfo> tickets_;
    std::vector<GrantRecord> log_;
    std::uint64_t next_ticket_ = 1;
    bool finished_ = false;
    double horizon_s_ = 0.0;
};

} // namespace ccsim
