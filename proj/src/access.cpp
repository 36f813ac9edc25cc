#include "ccsim/access.hpp"

namespace ccsim {

void AccessPolicy::grant(SubjectId subject, Section section, Right right, SubjectId granted_by) {
    if (right == Right::Write && !is_core_member(subject)) {
        throw SimError(ErrorCode::AccessDenied,
                       "write grant requires core-team membership (subject " +
                           std::to_string(subject) + ")");
    }
    auto it = grants_.find(subject);
    if (it == grants_.end()) {
        it = grants_.emplace(subject, std::array<std::uint8_t, kSectionCount>{}).first;
    }
    it->second[idx(section)] |= bit(right);
    log_.push_back(GrantRecord{subject, section, right, granted_by});
}

bool AccessPolicy::allows(SubjectId subject, Section section, Right right) const {
    auto it = grants_.find(subject);
    if (it == grants_.end()) {
        return false;
    }
    return (it->second[idx(section)] & bit(right)) != 0;
}

void AccessPolicy::apply_role_defaults(SubjectId subject, Role role, SubjectId granted_by) {
    for (Section section : all_sections()) {
        for (Right right : {Right::Read, Right::Write}) {
            if (default_access(role, section, right)) {
                grant(subject, section, right, granted_by);
            }
        }
    }
}

} // namespace ccsim
