#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccsim/domain.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

/// One state transition, as recorded for replay checks and export.
struct AuditRecord {
    SimTime time;
    CaseId case_id = 0;
    ContribId contrib_id = 0; // 0 when the action is not about a contribution
    SubjectId actor = 0;      // 0 is the system actor
    std::string action;
    std::string old_state;
    std::string new_state;
    std::uint64_t version = 0; // case version after the action
};

class AuditTrail {
public:
    void append(AuditRecord record) { records_.push_back(std::move(record)); }

    const std::vector<AuditRecord>& records() const { return records_; }

    /// Tab-separated line: time, case_id, contrib_id, actor, action,
    /// old_status, new_status, version.
    static std::string to_line(const AuditRecord& r);

    std::string export_text() const;

private:
    std::vector<AuditRecord> records_;
};

} // namespace ccsim
