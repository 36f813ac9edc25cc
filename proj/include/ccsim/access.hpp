#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ccsim/domain.hpp"
#include "ccsim/error.hpp"

namespace ccsim {

/// Discretionary access policy for one case record. The case manager owns it;
/// a subject without an explicit grant is denied.
class AccessPolicy {
public:
    struct GrantRecord {
        SubjectId subject;
        Section section;
        Right right;
        SubjectId granted_by;
    };

    void set_owner(SubjectId manager) { owner_ = manager; }
    std::optional<SubjectId> owner() const { return owner_; }

    void add_core_member(SubjectId subject) { core_.insert(subject); }
    bool is_core_member(SubjectId subject) const { return core_.count(subject) > 0; }

    /// Record a grant. Write grants require core-team membership.
    void grant(SubjectId subject, Section section, Right right, SubjectId granted_by);

    bool allows(SubjectId subject, Section section, Right right) const;

    /// Apply the role's baseline table for a subject joining the case.
    void apply_role_defaults(SubjectId subject, Role role, SubjectId granted_by);

    const std::vector<GrantRecord>& grants() const { return log_; }

private:
    static std::size_t idx(Section s) { return static_cast<std::size_t>(s); }
    static std::uint8_t bit(Right r) { return r == Right::Read ? 1 : 2; }

    std::map<SubjectId, std::array<std::uint8_t, kSectionCount>> grants_;
    std::set<SubjectId> core_;
    std::optional<SubjectId> owner_;
    std::vector<GrantRecord> log_;
};

} // namespace ccsim
