#include "ccsim/collaboration.hpp"

#include <algorithm>
#include <cmath>

#include "ccsim/error.hpp"

namespace ccsim {

// --- transition table --------------------------------------------------------

TransitionTable TransitionTable::defaults() {
    TransitionTable t;
    t.probabilities[{CaseStage::Enrolled, CaseStage::Diagnosis}] = 1.0;
    t.probabilities[{CaseStage::Diagnosis, CaseStage::InformationGathering}] = 1.0;
    t.probabilities[{CaseStage::InformationGathering, CaseStage::IteratingSolutions}] = 0.8;
    t.probabilities[{CaseStage::InformationGathering, CaseStage::Diagnosis}] = 0.2;
    t.probabilities[{CaseStage::IteratingSolutions, CaseStage::TreatmentAssessment}] = 0.7;
    t.probabilities[{CaseStage::IteratingSolutions, CaseStage::InformationGathering}] = 0.3;
    t.probabilities[{CaseStage::TreatmentAssessment, CaseStage::Closed}] = 1.0;
    t.dwell_mean_s[CaseStage::Diagnosis] = 2.0 * kSecondsPerDay;
    t.dwell_mean_s[CaseStage::InformationGathering] = 1.0 * kSecondsPerDay;
    t.dwell_mean_s[CaseStage::IteratingSolutions] = 3.0 * kSecondsPerDay;
    t.dwell_mean_s[CaseStage::TreatmentAssessment] = 1.0 * kSecondsPerDay;
    return t;
}

void TransitionTable::validate() const {
    for (const auto& [edge, p] : probabilities) {
        if (p < 0.0 || p > 1.0) {
            throw SimError(ErrorCode::InvalidTransitionTable,
                           std::string("probability out of range on ") + stage_name(edge.first) +
                               "->" + stage_name(edge.second));
        }
        if (edge.first == CaseStage::Closed && p > 0.0) {
            throw SimError(ErrorCode::InvalidTransitionTable,
                           "terminal stage has an outgoing edge");
        }
        if (p > 0.0 && edge.second != CaseStage::Closed) {
            if (dwell_mean_s.find(edge.second) == dwell_mean_s.end()) {
                throw SimError(ErrorCode::InvalidTransitionTable,
                               std::string("no dwell mean for reachable stage ") +
                                   stage_name(edge.second));
            }
        }
    }
    for (CaseStage stage : all_stages()) {
        if (stage == CaseStage::Closed) continue;
        double sum = 0.0;
        for (const auto& [edge, p] : probabilities) {
            if (edge.first == stage) sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw SimError(ErrorCode::InvalidTransitionTable,
                           std::string("outgoing probabilities from ") + stage_name(stage) +
                               " sum to " + std::to_string(sum));
        }
    }
    for (const auto& [stage, mean] : dwell_mean_s) {
        if (mean < 0.0) {
            throw SimError(ErrorCode::InvalidTransitionTable,
                           std::string("negative dwell mean for ") + stage_name(stage));
        }
    }
}

std::vector<std::pair<CaseStage, double>> TransitionTable::outgoing(CaseStage from) const {
    std::vector<std::pair<CaseStage, double>> out;
    for (const auto& [edge, p] : probabilities) {
        if (edge.first == from && p > 0.0) out.emplace_back(edge.second, p);
    }
    return out;
}

CaseStage TransitionTable::sample_next(CaseStage from, RandomStream& rng) const {
    auto edges = outgoing(from);
    if (edges.empty()) {
        throw SimError(ErrorCode::InvalidTransitionTable,
                       std::string("no outgoing edges from ") + stage_name(from));
    }
    double u = rng.uniform01();
    double cdf = 0.0;
    for (const auto& [to, p] : edges) {
        cdf += p;
        if (u < cdf) return to;
    }
    return edges.back().first; // guard against a sum a hair under 1
}

double TransitionTable::sample_dwell(CaseStage stage, RandomStream& rng) const {
    auto it = dwell_mean_s.find(stage);
    double mean = it == dwell_mean_s.end() ? 0.0 : it->second;
    return fixed_dwell ? mean : rng.exponential(mean);
}

// --- collaboration workflow ----------------------------------------------------

const char* request_state_name(RequestState state) {
    switch (state) {
    case RequestState::Sent: return "Sent";
    case RequestState::Delivered: return "Delivered";
    case RequestState::Accepted: return "Accepted";
    }
    return "?";
}

CoreTeam Workflow::establish_core_team(CaseId case_id,
                                       const std::vector<std::pair<SubjectId, Role>>& pool,
                                       double fraction, RandomStream& rng, SimTime now) {
    if (pool.empty()) {
        throw SimError(ErrorCode::EmptyPool, "collaborator pool is empty");
    }
    std::vector<std::size_t> managers;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool[i].second == Role::CaseManager) managers.push_back(i);
    }
    if (managers.empty()) {
        throw SimError(ErrorCode::NoCaseManagerInPool, "no case manager in the pool");
    }
    std::size_t leader_idx = managers[managers.size() == 1 ? 0 : rng.pick(managers.size())];
    SubjectId leader = pool[leader_idx].first;

    // Required coverage: the leader plus one of each clinical anchor role that
    // the pool can actually supply.
    std::vector<bool> chosen(pool.size(), false);
    chosen[leader_idx] = true;
    std::vector<std::size_t> picked; // member indices, leader excluded
    for (Role anchor : {Role::Nurse, Role::LabTechnician}) {
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!chosen[i] && pool[i].second == anchor) candidates.push_back(i);
        }
        if (!candidates.empty()) {
            std::size_t i = candidates[candidates.size() == 1 ? 0 : rng.pick(candidates.size())];
            chosen[i] = true;
            picked.push_back(i);
        }
    }

    std::size_t target_size =
        std::max(picked.size() + 1,
                 static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pool.size()))));
    while (picked.size() + 1 < target_size) {
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (!chosen[i]) rest.push_back(i);
        }
        if (rest.empty()) break;
        std::size_t i = rest[rest.size() == 1 ? 0 : rng.pick(rest.size())];
        chosen[i] = true;
        picked.push_back(i);
    }
    std::sort(picked.begin(), picked.end()); // pool order, independent of draw order

    CoreTeam team;
    team.case_id = case_id;
    team.leader = leader;
    team.formed_at = now;
    for (std::size_t i : picked) team.members.push_back(pool[i]);
    team.leader_only = team.members.empty();

    store_.assign_manager(case_id, leader, now);
    for (const auto& [subject, role] : team.members) {
        store_.add_team_member(case_id, subject, now);
    }
    return teams_[case_id] = team;
}

std::size_t Workflow::open_collaboration(CaseId case_id, SimTime now) {
    const CoreTeam& team = this->team(case_id);
    std::size_t opened = 0;
    for (const auto& [subject, role] : team.members) {
        CollaborationRequest req;
        req.case_id = case_id;
        req.collaborator = subject;
        req.team = role;
        req.role_description = std::string(role_name(role)) + " duties on case " +
                               std::to_string(case_id);
        req.schedule.emplace_back(now + kSecondsPerDay, kSecondsPerHour);
        req.prior_info.push_back(Section::TeamDetails);
        if (auto home = role_home_section(role)) req.prior_info.push_back(*home);
        req.state = RequestState::Sent;
        req.sent_at = now;
        std::size_t index = requests_.size();
        requests_.push_back(std::move(req));
        ++opened;

        bus_.schedule(now + feedback_latency_s_, EventKind::RequestDelivered,
                      "S" + std::to_string(subject), index, [this, index](const Event& ev) {
                          CollaborationRequest& r = requests_[index];
                          r.state = RequestState::Delivered;
                          r.delivered_at = ev.time;
                          if (response_delay_s_ <= 0.0) {
                              r.state = RequestState::Accepted;
                              r.accepted_at = ev.time;
                              return;
                          }
                          bus_.schedule(ev.time + response_delay_s_, EventKind::RequestDelivered,
                                        "S" + std::to_string(r.collaborator), index,
                                        [this, index](const Event& ev2) {
                                            CollaborationRequest& r2 = requests_[index];
                                            r2.state = RequestState::Accepted;
                                            r2.accepted_at = ev2.time;
                                        });
                      });
    }
    return opened;
}

CaseStage Workflow::advance_stage(CaseId case_id, RandomStream& rng, SimTime now) {
    CaseStage current = store_.stage(case_id);
    if (current == CaseStage::Closed) {
        throw SimError(ErrorCode::TerminalStage,
                       "case " + std::to_string(case_id) + " is closed");
    }
    CaseStage next = table_.sample_next(current, rng);
    if (next == CaseStage::Closed) {
        // Closure is explicit: the caller confirms via close_case so the
        // terminal bookkeeping happens exactly once.
        return CaseStage::Closed;
    }
    store_.record_stage_transition(case_id, current, next, now);
    note_transition(case_id, current, next, now);
    if (on_stage_entry_) on_stage_entry_(case_id, next, now);

    double dwell = table_.sample_dwell(next, rng);
    bus_.schedule(now + dwell, EventKind::StageCompleted, CaseStore::case_label(case_id),
                  static_cast<std::uint64_t>(next), [this, case_id](const Event& ev) {
                      if (on_stage_completion_) on_stage_completion_(case_id, ev.time);
                  });
    return next;
}

void Workflow::close_case(CaseId case_id, SimTime now) {
    CaseStage current = store_.stage(case_id);
    if (current != CaseStage::TreatmentAssessment) {
        throw SimError(ErrorCode::NotAssessed,
                       "case " + std::to_string(case_id) + " is in " + stage_name(current));
    }
    store_.record_stage_transition(case_id, current, CaseStage::Closed, now);
    note_transition(case_id, current, CaseStage::Closed, now);

    if (metrics_) {
        const FlowState& f = flow(case_id);
        metrics_->record_close(case_id, now - store_.enrolled_at(case_id),
                               stage_path_string(case_id));
        if (f.first_diagnosis_entry && f.last_gathering_exit) {
            metrics_->record_delay(case_id, DelayKind::ClinicalEvaluationDelay,
                                   *f.last_gathering_exit - *f.first_diagnosis_entry);
        }
    }
}

void Workflow::note_treatment_grant(CaseId case_id, SimTime granted_at) {
    FlowState& f = flow(case_id);
    if (f.treatment_grant_seen || !f.last_iterating_exit) return;
    f.treatment_grant_seen = true;
    if (metrics_) {
        metrics_->record_delay(case_id, DelayKind::TreatmentAccessDelay,
                               granted_at - *f.last_iterating_exit);
    }
}

const CoreTeam& Workflow::team(CaseId case_id) const {
    auto it = teams_.find(case_id);
    if (it == teams_.end()) {
        throw SimError(ErrorCode::UnknownCase,
                       "no core team for case " + std::to_string(case_id));
    }
    return it->second;
}

std::vector<CaseStage> Workflow::stage_path(CaseId case_id) const {
    std::vector<CaseStage> out{CaseStage::Enrolled};
    auto it = flows_.find(case_id);
    if (it != flows_.end()) {
        for (const auto& [stage, _] : it->second.entries) out.push_back(stage);
    }
    return out;
}

std::string Workflow::stage_path_string(CaseId case_id) const {
    std::string out;
    for (CaseStage stage : stage_path(case_id)) {
        if (!out.empty()) out += '>';
        out += stage_name(stage);
    }
    return out;
}

Workflow::FlowState& Workflow::flow(CaseId case_id) { return flows_[case_id]; }

void Workflow::note_transition(CaseId case_id, CaseStage from, CaseStage to, SimTime now) {
    FlowState& f = flow(case_id);
    f.entries.emplace_back(to, now);
    if (to == CaseStage::Diagnosis && !f.first_diagnosis_entry) f.first_diagnosis_entry = now;
    if (from == CaseStage::InformationGathering) f.last_gathering_exit = now;
    if (from == CaseStage::IteratingSolutions) f.last_iterating_exit = now;
}

} // namespace ccsim
