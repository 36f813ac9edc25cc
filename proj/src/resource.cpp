#include "ccsim/resource.hpp"

#include <cassert>

#include "ccsim/error.hpp"

namespace ccsim {

const char* resource_kind_name(ResourceKind kind) {
    switch (kind) {
    case ResourceKind::Personnel: return "Personnel";
    case ResourceKind::Facility: return "Facility";
    case ResourceKind::Equipment: return "Equipment";
    }
    return "?";
}

std::optional<ResourceKind> resource_kind_from_name(const std::string& name) {
    for (ResourceKind k :
         {ResourceKind::Personnel, ResourceKind::Facility, ResourceKind::Equipment}) {
        if (name == resource_kind_name(k)) return k;
    }
    return std::nullopt;
}

void ResourcePool::add_resource(const std::string& name, ResourceKind kind, int capacity) {
    if (capacity < 1) {
        throw SimError(ErrorCode::ValidationError,
                       "resource " + name + " needs positive capacity");
    }
    Resource r;
    r.name = name;
    r.kind = kind;
    r.capacity = capacity;
    resources_[name] = std::move(r);
}

ResourcePool::Ticket ResourcePool::request(const std::string& resource, int units,
                                           const std::string& holder, double duration_s,
                                           SimTime now, GrantCallback on_grant) {
    Resource& r = require(resource);
    if (units < 1 || units > r.capacity) {
        throw SimError(ErrorCode::UnitsExceedCapacity,
                       resource + ": " + std::to_string(units) + " units against capacity " +
                           std::to_string(r.capacity));
    }
    std::uint64_t id = next_ticket_++;
    GrantRecord rec;
    rec.ticket = id;
    rec.resource = resource;
    rec.holder = holder;
    rec.units = units;
    rec.requested_at = now.seconds();
    tickets_[id] = TicketInfo{resource, units, TicketState::Queued, log_.size()};
    log_.push_back(std::move(rec));

    if (r.in_use + units <= r.capacity && r.wait_queue.empty()) {
        grant_now(r, id, units, duration_s, now, on_grant, /*from_queue=*/false);
        return Ticket{id, true, 0};
    }
    r.wait_queue.push_back(Waiting{id, units, duration_s, std::move(on_grant)});
    r.max_queue = std::max(r.max_queue, r.wait_queue.size());
    return Ticket{id, false, r.wait_queue.size()};
}

void ResourcePool::release(std::uint64_t ticket, SimTime now) {
    auto it = tickets_.find(ticket);
    if (it == tickets_.end() || it->second.state != TicketState::Active) {
        throw SimError(ErrorCode::AlreadyReleased, "ticket " + std::to_string(ticket));
    }
    release_units(ticket, now);
}

int ResourcePool::capacity(const std::string& resource) const { return require(resource).capacity; }

int ResourcePool::in_use(const std::string& resource) const { return require(resource).in_use; }

std::size_t ResourcePool::queue_len(const std::string& resource) const {
    return require(resource).wait_queue.size();
}

void ResourcePool::finish(SimTime horizon) {
    for (auto& [name, r] : resources_) {
        integrate(r, horizon.seconds());
    }
    horizon_s_ = horizon.seconds();
    finished_ = true;
}

UtilizationRecord ResourcePool::utilization_report(const std::string& resource) const {
    if (!finished_) {
        throw SimError(ErrorCode::RunNotFinished, "usage books are still open");
    }
    const Resource& r = require(resource);
    UtilizationRecord rec;
    rec.resource_id = r.name;
    rec.busy_time_s = r.busy_time_s;
    rec.horizon_s = horizon_s_;
    rec.utilization = horizon_s_ > 0.0
                          ? r.busy_time_s / (static_cast<double>(r.capacity) * horizon_s_)
                          : 0.0;
    rec.max_queue_len = r.max_queue;
    double total = 0.0;
    for (double w : r.waits_s) total += w;
    rec.mean_wait_s = r.waits_s.empty() ? 0.0 : total / static_cast<double>(r.waits_s.size());
    return rec;
}

std::vector<UtilizationRecord> ResourcePool::all_reports() const {
    std::vector<UtilizationRecord> out;
    out.reserve(resources_.size());
    for (const auto& [name, _] : resources_) out.push_back(utilization_report(name));
    return out;
}

std::vector<std::string> ResourcePool::detect_bottlenecks(
    const std::vector<UtilizationRecord>& records, double threshold, double wait_ceiling_s) {
    std::vector<std::string> flagged;
    for (const UtilizationRecord& rec : records) {
        bool hot = rec.utilization >= threshold;
        bool backed_up = rec.max_queue_len > 0 && rec.mean_wait_s > wait_ceiling_s;
        if (hot || backed_up) flagged.push_back(rec.resource_id);
    }
    return flagged;
}

ResourcePool::Resource& ResourcePool::require(const std::string& name) {
    auto it = resources_.find(name);
    if (it == resources_.end()) {
        throw SimError(ErrorCode::UnknownResource, name);
    }
    return it->second;
}

const ResourcePool::Resource& ResourcePool::require(const std::string& name) const {
    auto it = resources_.find(name);
    if (it == resources_.end()) {
        throw SimError(ErrorCode::UnknownResource, name);
    }
    return it->second;
}

void ResourcePool::integrate(Resource& r, double now_s) {
    assert(now_s >= r.last_change_s);
    r.busy_time_s += static_cast<double>(r.in_use) * (now_s - r.last_change_s);
    r.last_change_s = now_s;
}

void ResourcePool::grant_now(Resource& r, std::uint64_t ticket, int units, double duration_s,
                             SimTime now, const GrantCallback& on_grant, bool from_queue) {
    integrate(r, now.seconds());
    r.in_use += units;
    assert(r.in_use <= r.capacity);

    TicketInfo& info = tickets_.at(ticket);
    info.state = TicketState::Active;
    GrantRecord& rec = log_[info.log_index];
    rec.granted_at = now.seconds();
    if (from_queue) {
        rec.waited = true;
        r.waits_s.push_back(rec.granted_at - rec.requested_at);
    }

    // The hold ends on schedule unless the holder already let go explicitly.
    bus_.schedule(now + duration_s, EventKind::ResourceFreed, r.name, ticket,
                  [this, ticket](const Event& ev) {
                      auto it = tickets_.find(ticket);
                      if (it != tickets_.end() && it->second.state == TicketState::Active) {
                          release_units(ticket, ev.time);
                      }
                  });
    if (on_grant) on_grant(ticket, now);
}

void ResourcePool::release_units(std::uint64_t ticket, SimTime now) {
    TicketInfo& info = tickets_.at(ticket);
    Resource& r = require(info.resource);
    integrate(r, now.seconds());
    info.state = TicketState::Released;
    log_[info.log_index].released_at = now.seconds();
    r.in_use -= info.units;
    assert(r.in_use >= 0);

    // FIFO promotion: hand the freed units straight to the queue head; stop
    // at the first head that still does not fit.
    while (!r.wait_queue.empty() && r.in_use + r.wait_queue.front().units <= r.capacity) {
        Waiting head = std::move(r.wait_queue.front());
        r.wait_queue.pop_front();
        grant_now(r, head.ticket, head.units, head.duration_s, now, head.on_grant,
                  /*from_queue=*/true);
    }
}

} // namespace ccsim
