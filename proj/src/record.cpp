#include "ccsim/record.hpp"

#include <cmath>

#include "ccsim/error.hpp"

namespace ccsim {

// --- audit trail -----------------------------------------------------------

std::string AuditTrail::to_line(const AuditRecord& r) {
    std::string out = format_seconds(r.time);
    out += '\t';
    out += std::to_string(r.case_id);
    out += '\t';
    out += std::to_string(r.contrib_id);
    out += '\t';
    out += std::to_string(r.actor);
    out += '\t';
    out += r.action;
    out += '\t';
    out += r.old_state;
    out += '\t';
    out += r.new_state;
    out += '\t';
    out += std::to_string(r.version);
    return out;
}

std::string AuditTrail::export_text() const {
    std::string out;
    for (const AuditRecord& r : records_) {
        out += to_line(r);
        out += '\n';
    }
    return out;
}

// --- delivery policy -------------------------------------------------------

const char* contribution_status_name(ContributionStatus status) {
    switch (status) {
    case ContributionStatus::Pending: return "Pending";
    case ContributionStatus::Flagged: return "Flagged";
    case ContributionStatus::Approved: return "Approved";
    case ContributionStatus::Merged: return "Merged";
    }
    return "?";
}

SimTime DeliveryPolicy::delivery_time(SimTime merged_at) const {
    if (strategy == Strategy::VcsModel) {
        return merged_at + feedback_latency_s;
    }
    // Periodic hand-over: readers see the update at the next sync tick; a
    // merge landing exactly on a tick goes out with that tick (zero wait).
    double w = baseline_sync_interval_s;
    double ticks = std::ceil(merged_at.seconds() / w);
    SimTime next{ticks * w};
    return next < merged_at ? merged_at : next;
}

// --- case store ------------------------------------------------------------

SubjectId CaseStore::register_subject(Role role) {
    SubjectId id = next_subject_++;
    subjects_[id] = role;
    return id;
}

Role CaseStore::subject_role(SubjectId subject) const {
    auto it = subjects_.find(subject);
    if (it == subjects_.end()) {
        throw SimError(ErrorCode::UnknownSubject, "subject " + std::to_string(subject));
    }
    return it->second;
}

EnrollmentInfo CaseStore::enroll_case(const std::string& bio, const std::string& history,
                                      const std::string& caretaker, SimTime now) {
    if (bio.empty()) {
        throw SimError(ErrorCode::EmptyEnrollment, "patient bio is required");
    }
    CaseState state;
    state.case_id = next_case_++;
    state.patient_bio = bio;
    state.medical_history = history;
    state.caretaker_details = caretaker;
    state.enrolled_at = now;
    state.patient = register_subject(Role::Patient);
    state.caretaker = register_subject(Role::Caretaker);
    state.policy.apply_role_defaults(state.patient, Role::Patient, 0);
    state.policy.apply_role_defaults(state.caretaker, Role::Caretaker, 0);
    for (SubjectId admin : administrators_) {
        state.policy.apply_role_defaults(admin, subject_role(admin), 0);
    }
    CaseId id = state.case_id;
    audit_transition(now, id, 0, 0, "enroll", "-", stage_name(CaseStage::Enrolled));
    EnrollmentInfo info{id, state.patient, state.caretaker};
    cases_.emplace(id, std::move(state));
    return info;
}

void CaseStore::assign_manager(CaseId case_id, SubjectId leader, SimTime now) {
    CaseState& state = require_case(case_id);
    if (subject_role(leader) != Role::CaseManager) {
        throw SimError(ErrorCode::NotCaseManager,
                       "subject " + std::to_string(leader) + " cannot own case policies");
    }
    state.manager = leader;
    state.policy.set_owner(leader);
    state.policy.add_core_member(leader);
    state.policy.apply_role_defaults(leader, Role::CaseManager, leader);
    audit_transition(now, case_id, 0, leader, "assign_manager", "-", "owner");
}

void CaseStore::add_team_member(CaseId case_id, SubjectId member, SimTime now) {
    CaseState& state = require_case(case_id);
    if (!state.manager) {
        throw SimError(ErrorCode::NotCaseManager, "case has no manager to admit members");
    }
    Role role = subject_role(member);
    state.policy.add_core_member(member);
    state.policy.apply_role_defaults(member, role, *state.manager);
    audit_transition(now, case_id, 0, member, "join_team", "-", role_name(role));
}

ContribId CaseStore::submit_contribution(CaseId case_id, SubjectId author, Section section,
                                         std::string payload, SimTime now) {
    CaseState& state = require_case(case_id);
    if (!state.policy.allows(author, section, Right::Write)) {
        throw SimError(ErrorCode::AccessDenied,
                       "subject " + std::to_string(author) + " has no write grant on " +
                           section_name(section));
    }
    Contribution contrib;
    contrib.contrib_id = next_contrib_++;
    contrib.case_id = case_id;
    contrib.author = author;
    contrib.role = subject_role(author);
    contrib.submitted_at = now;
    contrib.section = section;
    contrib.payload = std::move(payload);
    audit_transition(now, case_id, contrib.contrib_id, author, "submit", "-",
                     contribution_status_name(ContributionStatus::Pending));
    schedule_validation(contrib, now);
    ContribId id = contrib.contrib_id;
    contributions_.emplace(id, std::move(contrib));
    return id;
}

ContributionStatus CaseStore::validate(ContribId contrib_id, SubjectId manager, Verdict verdict,
                                       SimTime now) {
    Contribution& contrib = require_contribution(contrib_id);
    if (contrib.status != ContributionStatus::Pending) {
        throw SimError(ErrorCode::NotPending,
                       "contribution " + std::to_string(contrib_id) + " is " +
                           contribution_status_name(contrib.status));
    }
    const CaseState& state = require_case(contrib.case_id);
    if (!state.manager || *state.manager != manager) {
        throw SimError(ErrorCode::NotCaseManager,
                       "subject " + std::to_string(manager) + " does not manage case " +
                           std::to_string(contrib.case_id));
    }
    ContributionStatus next = verdict == Verdict::Ok ? ContributionStatus::Approved
                                                     : ContributionStatus::Flagged;
    audit_transition(now, contrib.case_id, contrib_id, manager, "validate",
                     contribution_status_name(contrib.status), contribution_status_name(next));
    contrib.status = next;
    if (next == ContributionStatus::Flagged) {
        // Tell the author their input needs rework; the notice travels with
        // the usual feedback latency.
        bus_.schedule(now + feedback_latency_s_, EventKind::RequestDelivered,
                      "S" + std::to_string(contrib.author), contrib_id,
                      [this, contrib_id](const Event& ev) {
                          if (on_flag_notice_) on_flag_notice_(contrib_id, ev.time);
                      });
    }
    return next;
}

int CaseStore::resubmit(ContribId contrib_id, SubjectId caller, std::string payload, SimTime now) {
    Contribution& contrib = require_contribution(contrib_id);
    if (contrib.status != ContributionStatus::Flagged) {
        throw SimError(ErrorCode::NotFlagged,
                       "contribution " + std::to_string(contrib_id) + " is " +
                           contribution_status_name(contrib.status));
    }
    if (contrib.author != caller) {
        throw SimError(ErrorCode::NotAuthor,
                       "subject " + std::to_string(caller) + " did not author contribution " +
                           std::to_string(contrib_id));
    }
    contrib.payload = std::move(payload);
    contrib.revision += 1;
    audit_transition(now, contrib.case_id, contrib_id, caller, "resubmit",
                     contribution_status_name(contrib.status),
                     contribution_status_name(ContributionStatus::Pending));
    contrib.status = ContributionStatus::Pending;
    schedule_validation(contrib, now);
    return contrib.revision;
}

std::uint64_t CaseStore::approve_and_merge(ContribId contrib_id, SubjectId manager, SimTime now) {
    Contribution& contrib = require_contribution(contrib_id);
    if (contrib.status != ContributionStatus::Approved) {
        throw SimError(ErrorCode::NotApproved,
                       "contribution " + std::to_string(contrib_id) + " is " +
                           contribution_status_name(contrib.status));
    }
    CaseState& state = require_case(contrib.case_id);
    if (!state.manager || *state.manager != manager) {
        throw SimError(ErrorCode::NotCaseManager,
                       "subject " + std::to_string(manager) + " does not manage case " +
                           std::to_string(contrib.case_id));
    }
    std::string was = contribution_status_name(contrib.status);
    contrib.status = ContributionStatus::Merged;
    state.merged_log.push_back(contrib_id);
    state.version = state.merged_log.size();
    state.sections[contrib.section].merged = contrib.payload;
    audit_transition(now, contrib.case_id, contrib_id, manager, "merge", std::move(was),
                     contribution_status_name(ContributionStatus::Merged));

    if (metrics_) {
        metrics_->record_delay(contrib.case_id, DelayKind::SubmitToMergeDelay,
                               now - contrib.submitted_at);
    }
    SimTime delivered_at = delivery_.delivery_time(now);
    if (metrics_) {
        metrics_->record_delay(contrib.case_id, DelayKind::InfoAvailabilityDelay,
                               delivered_at - now);
    }
    CaseId case_id = contrib.case_id;
    Section section = contrib.section;
    std::string payload = contrib.payload;
    bus_.schedule(delivered_at, EventKind::MergeCompleted, case_label(case_id), contrib_id,
                  [this, case_id, section, payload](const Event&) {
                      require_case(case_id).sections[section].delivered = payload;
                  });
    return state.version;
}

std::string CaseStore::read_section(CaseId case_id, SubjectId subject, Section section) const {
    const CaseState& state = require_case(case_id);
    if (!state.policy.allows(subject, section, Right::Read)) {
        throw SimError(ErrorCode::AccessDenied,
                       "subject " + std::to_string(subject) + " has no read grant on " +
                           section_name(section));
    }
    auto it = state.sections.find(section);
    return it == state.sections.end() ? std::string() : it->second.delivered;
}

void CaseStore::grant(CaseId case_id, SubjectId manager, SubjectId subject, Section section,
                      Right right, SimTime now) {
    CaseState& state = require_case(case_id);
    if (!state.manager || *state.manager != manager) {
        throw SimError(ErrorCode::NotCaseManager,
                       "subject " + std::to_string(manager) + " does not own case " +
                           std::to_string(case_id) + " policies");
    }
    state.policy.grant(subject, section, right, manager);
    audit_transition(now, case_id, 0, manager, "grant", "-",
                     std::string(section_name(section)) + "/" + right_name(right) + "->" +
                         std::to_string(subject));
}

void CaseStore::record_stage_transition(CaseId case_id, CaseStage from, CaseStage to,
                                        SimTime now) {
    CaseState& state = require_case(case_id);
    state.stage = to;
    audit_transition(now, case_id, 0, 0, "stage", stage_name(from), stage_name(to));
}

CaseStage CaseStore::stage(CaseId case_id) const { return require_case(case_id).stage; }

const Contribution& CaseStore::contribution(ContribId contrib_id) const {
    auto it = contributions_.find(contrib_id);
    if (it == contributions_.end()) {
        throw SimError(ErrorCode::UnknownContribution, std::to_string(contrib_id));
    }
    return it->second;
}

std::uint64_t CaseStore::version(CaseId case_id) const { return require_case(case_id).version; }

const std::vector<ContribId>& CaseStore::merged_log(CaseId case_id) const {
    return require_case(case_id).merged_log;
}

SimTime CaseStore::enrolled_at(CaseId case_id) const {
    return require_case(case_id).enrolled_at;
}

std::optional<SubjectId> CaseStore::manager_of(CaseId case_id) const {
    return require_case(case_id).manager;
}

const AccessPolicy& CaseStore::policy(CaseId case_id) const {
    return require_case(case_id).policy;
}

CaseRecordView CaseStore::snapshot(CaseId case_id) const {
    const CaseState& state = require_case(case_id);
    CaseRecordView view;
    view.case_id = state.case_id;
    view.patient_bio = state.patient_bio;
    view.medical_history = state.medical_history;
    view.caretaker_details = state.caretaker_details;
    view.stage = state.stage;
    view.version = state.version;
    view.merged_log = state.merged_log;
    for (const auto& [section, content] : state.sections) {
        view.sections[section] = content.merged;
    }
    return view;
}

std::vector<CaseId> CaseStore::case_ids() const {
    std::vector<CaseId> out;
    out.reserve(cases_.size());
    for (const auto& [id, _] : cases_) out.push_back(id);
    return out;
}

CaseStore::CaseState& CaseStore::require_case(CaseId case_id) {
    auto it = cases_.find(case_id);
    if (it == cases_.end()) {
        throw SimError(ErrorCode::UnknownCase, std::to_string(case_id));
    }
    return it->second;
}

const CaseStore::CaseState& CaseStore::require_case(CaseId case_id) const {
    auto it = cases_.find(case_id);
    if (it == cases_.end()) {
        throw SimError(ErrorCode::UnknownCase, std::to_string(case_id));
    }
    return it->second;
}

Contribution& CaseStore::require_contribution(ContribId contrib_id) {
    auto it = contributions_.find(contrib_id);
    if (it == contributions_.end()) {
        throw SimError(ErrorCode::UnknownContribution, std::to_string(contrib_id));
    }
    return it->second;
}

void CaseStore::schedule_validation(const Contribution& contrib, SimTime now) {
    ContribId id = contrib.contrib_id;
    bus_.schedule(now + validation_latency_s_, EventKind::ValidationCompleted,
                  case_label(contrib.case_id), id, [this, id](const Event& ev) {
                      if (on_validation_due_) on_validation_due_(id, ev.time);
                  });
}

void CaseStore::audit_transition(SimTime now, CaseId case_id, ContribId contrib_id,
                                 SubjectId actor, std::string action, std::string old_state,
                                 std::string new_state) {
    AuditRecord record;
    record.time = now;
    record.case_id = case_id;
    record.contrib_id = contrib_id;
    record.actor = actor;
    record.action = std::move(action);
    record.old_state = std::move(old_state);
    record.new_state = std::move(new_state);
    record.version = has_case(case_id) ? cases_.at(case_id).version : 0;
    audit_.append(std::move(record));
}

} // namespace ccsim
