#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccsim/collaboration.hpp"
#include "ccsim/domain.hpp"
#include "ccsim/record.hpp"
#include "ccsim/resource.hpp"

namespace ccsim {

/// Everything a run needs, normalized to seconds. Loaded from the key-tree
/// text format (2-space indents, `key: value`, `#` comments); every duration
/// in a file must carry a unit from {s, min, h, d}.
struct ScenarioConfig {
    std::uint64_t seed = 42;
    double horizon_s = 180.0 * kSecondsPerDay;
    double arrival_rate_per_day = 6.0; // Poisson case arrivals; 0 disables
    std::vector<double> explicit_arrivals_s; // overrides the rate when nonempty
    double feedback_latency_s = 15.0;
    double validation_latency_s = 1440.0;
    double p_flag = 0.1;
    double response_delay_s = 0.0;
    int contributions_per_stage = 1;
    DeliveryPolicy::Strategy strategy = DeliveryPolicy::Strategy::VcsModel;
    double baseline_sync_interval_s = 7.0 * kSecondsPerDay;
    double core_fraction = 0.2;
    TransitionTable table = TransitionTable::defaults();
    std::map<Role, int> pool_counts = {
        {Role::CaseManager, 2}, {Role::Nurse, 6},        {Role::LabTechnician, 3},
        {Role::AlliedHealth, 3}, {Role::PsychoSocial, 2}, {Role::Administrator, 1},
    };

    struct ResourceSpec {
        std::string name;
        ResourceKind kind = ResourceKind::Facility;
        int capacity = 1;
    };
    std::vector<ResourceSpec> resources = {{"treatment_room", ResourceKind::Facility, 8}};
    std::map<CaseStage, std::string> stage_resources = {
        {CaseStage::TreatmentAssessment, "treatment_room"},
    };

    double bottleneck_threshold = 0.9;
    double bottleneck_wait_ceiling_s = kSecondsPerHour;

    /// Throws ValidationError naming the first offending key.
    void validate() const;

    /// Fixed-order, unit-normalized rendering; input to the digest and the
    /// `validate` command's output.
    std::string canonical_text() const;

    /// FNV-1a 64 over the canonical text, as 16 hex digits.
    std::string digest() const;
};

/// Parses and validates config text. Throws ParseError (syntax, with line
/// numbers), MissingUnit (bare durations), or ValidationError (bad values).
ScenarioConfig parse_config(const std::string& text);

/// parse_config over a file's contents; ParseError if unreadable.
ScenarioConfig load_config(const std::string& path);

} // namespace ccsim
