#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ccsim/dispatcher.hpp"
#include "ccsim/domain.hpp"
#include "ccsim/metrics.hpp"
#include "ccsim/record.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

/// Stage-transition probabilities plus per-stage dwell means. The dwell draw
/// is exponential unless fixed_dwell pins every stay to its mean.
struct TransitionTable {
    std::map<std::pair<CaseStage, CaseStage>, double> probabilities;
    std::map<CaseStage, double> dwell_mean_s;
    bool fixed_dwell = false;

    static TransitionTable defaults();

    /// Throws InvalidTransitionTable unless every non-terminal row sums to 1
    /// (1e-9 tolerance), the terminal stage has no outgoing edges, and every
    /// reachable non-terminal target has a dwell mean.
    void validate() const;

    std::vector<std::pair<CaseStage, double>> outgoing(CaseStage from) const;
    CaseStage sample_next(CaseStage from, RandomStream& rng) const;
    double sample_dwell(CaseStage stage, RandomStream& rng) const;
};

/// The care team assembled for one case: a leading case manager plus the
/// slice of the collaborator pool selected around the required roles.
struct CoreTeam {
    CaseId case_id = 0;
    SubjectId leader = 0;
    std::vector<std::pair<SubjectId, Role>> members; // excludes the leader
    SimTime formed_at;
    bool leader_only = false; // degenerate single-manager pool
};

enum class RequestState : std::uint8_t { Sent, Delivered, Accepted };

const char* request_state_name(RequestState state);

/// The case manager's invitation to one team member.
struct CollaborationRequest {
    CaseId case_id = 0;
    SubjectId collaborator = 0;
    Role team = Role::Nurse;
    std::string role_description;
    std::vector<std::pair<SimTime, double>> schedule; // (start, duration s)
    std::vector<Section> prior_info;
    RequestState state = RequestState::Sent;
    SimTime sent_at;
    SimTime delivered_at;
    SimTime accepted_at;
};

/// Per-case workflow: team formation, request fan-out, stage progression, and
/// closure bookkeeping. Clinical delay metrics fall out of the stage walk.
class Workflow {
public:
    Workflow(Dispatcher& bus, CaseStore& store, MetricsCollector* metrics = nullptr)
        : bus_(bus), store_(store), metrics_(metrics), table_(TransitionTable::defaults()) {}

    void set_table(TransitionTable table) {
        table.validate();
        table_ = std::move(table);
    }
    const TransitionTable& table() const { return table_; }
    void set_feedback_latency(double s) { feedback_latency_s_ = s; }
    void set_response_delay(double s) { response_delay_s_ = s; }

    /// Fires when a case finishes its dwell in the current stage.
    void set_stage_completion_handler(std::function<void(CaseId, SimTime)> fn) {
        on_stage_completion_ = std::move(fn);
    }
    /// Fires on entry to each newly sampled stage, before its dwell starts.
    void set_stage_entry_handler(std::function<void(CaseId, CaseStage, SimTime)> fn) {
        on_stage_entry_ = std::move(fn);
    }

    CoreTeam establish_core_team(CaseId case_id,
                                 const std::vector<std::pair<SubjectId, Role>>& pool,
                                 double fraction, RandomStream& rng, SimTime now);
    std::size_t open_collaboration(CaseId case_id, SimTime now);
    CaseStage advance_stage(CaseId case_id, RandomStream& rng, SimTime now);
    void close_case(CaseId case_id, SimTime now);

    /// Called by the driver when the stage-bound resource grant for the
    /// treatment stage lands; feeds the treatment-access delay.
    void note_treatment_grant(CaseId case_id, SimTime granted_at);

    const CoreTeam& team(CaseId case_id) const;
    bool has_team(CaseId case_id) const { return teams_.count(case_id) > 0; }
    const std::vector<CollaborationRequest>& requests() const { return requests_; }
    std::vector<CaseStage> stage_path(CaseId case_id) const;
    std::string stage_path_string(CaseId case_id) const;

private:
    struct FlowState {
        std::vector<std::pair<CaseStage, SimTime>> entries; // stage entered, when
        std::optional<SimTime> first_diagnosis_entry;
        std::optional<SimTime> last_gathering_exit;
        std::optional<SimTime> last_iterating_exit;
        bool treatment_grant_seen = false;
    };

    FlowState& flow(CaseId case_id);
    void note_transition(CaseId case_id, CaseStage from, CaseStage to, SimTime now);

    Dispatcher& bus_;
    CaseStore& store_;
    MetricsCollector* metrics_;
    TransitionTable table_;
    double feedback_latency_s_ = 15.0;
    double response_delay_s_ = 0.0;
    std::map<CaseId, CoreTeam> teams_;
    std::map<CaseId, FlowState> flows_;
    std::vector<CollaborationRequest> requests_;
    std::function<void(CaseId, SimTime)> on_stage_completion_;
    std::function<void(CaseId, CaseStage, SimTime)> on_stage_entry_;
};

} // namespace ccsim
