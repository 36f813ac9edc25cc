#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/access.hpp"
#include "ccsim/audit.hpp"
#include "ccsim/dispatcher.hpp"
#include "ccsim/domain.hpp"
#include "ccsim/metrics.hpp"

namespace ccsim {

enum class ContributionStatus : std::uint8_t { Pending, Flagged, Approved, Merged };
enum class Verdict : std::uint8_t { Ok, Irregular };

const char* contribution_status_name(ContributionStatus status);

/// A collaborator's submitted input on its way into the case record.
struct Contribution {
    ContribId contrib_id = 0;
    CaseId case_id = 0;
    SubjectId author = 0;
    Role role = Role::Nurse;
    SimTime submitted_at;
    Section section = Section::TreatmentPlan;
    std::string payload;
    ContributionStatus status = ContributionStatus::Pending;
    int revision = 0;
};

/// How a merged update reaches entitled readers. The versioned model pushes
/// after the feedback latency; the baseline batches everything merged since
/// the previous periodic sync and hands it over at the next tick.
struct DeliveryPolicy {
    enum class Strategy : std::uint8_t { VcsModel, Baseline };

    Strategy strategy = Strategy::VcsModel;
    double feedback_latency_s = 15.0;
    double baseline_sync_interval_s = 7.0 * kSecondsPerDay;

    SimTime delivery_time(SimTime merged_at) const;
};

/// Read-only snapshot of one case, exportable after a run.
struct CaseRecordView {
    CaseId case_id = 0;
    std::string patient_bio;
    std::string medical_history;
    std::string caretaker_details;
    CaseStage stage = CaseStage::Enrolled;
    std::uint64_t version = 0;
    std::vector<ContribId> merged_log;
    std::map<Section, std::string> sections; // latest merged content per section
};

struct EnrollmentInfo {
    CaseId case_id = 0;
    SubjectId patient = 0;
    SubjectId caretaker = 0;
};

/// The versioned case records plus their contribution lifecycles, access
/// policies, and the audit trail. All mutation happens inside event dispatch
/// on the owning engine.
class CaseStore {
public:
    explicit CaseStore(Dispatcher& bus, MetricsCollector* metrics = nullptr)
        : bus_(bus), metrics_(metrics) {}

    void set_latencies(double feedback_s, double validation_s) {
        feedback_latency_s_ = feedback_s;
        validation_latency_s_ = validation_s;
    }
    void set_delivery_policy(DeliveryPolicy policy) { delivery_ = policy; }
    void set_administrators(std::vector<SubjectId> admins) { administrators_ = std::move(admins); }

    /// Fires when a scheduled validation falls due / a flag notice reaches its
    /// author. The scenario driver reacts; unit tests may leave these unset.
    void set_validation_handler(std::function<void(ContribId, SimTime)> fn) {
        on_validation_due_ = std::move(fn);
    }
    void set_flag_notice_handler(std::function<void(ContribId, SimTime)> fn) {
        on_flag_notice_ = std::move(fn);
    }

    SubjectId register_subject(Role role);
    Role subject_role(SubjectId subject) const;

    EnrollmentInfo enroll_case(const std::string& bio, const std::string& history,
                               const std::string& caretaker, SimTime now);

    /// Team formation hooks: the leader becomes policy owner and manager of
    /// record; members join the core team with their role's baseline grants.
    void assign_manager(CaseId case_id, SubjectId leader, SimTime now);
    void add_team_member(CaseId case_id, SubjectId member, SimTime now);

    ContribId submit_contribution(CaseId case_id, SubjectId author, Section section,
                                  std::string payload, SimTime now);
    ContributionStatus validate(ContribId contrib_id, SubjectId manager, Verdict verdict,
                                SimTime now);
    int resubmit(ContribId contrib_id, SubjectId caller, std::string payload, SimTime now);
    std::uint64_t approve_and_merge(ContribId contrib_id, SubjectId manager, SimTime now);

    std::string read_section(CaseId case_id, SubjectId subject, Section section) const;
    void grant(CaseId case_id, SubjectId manager, SubjectId subject, Section section, Right right,
               SimTime now);

    /// Stage mirror, owned by the collaboration workflow.
    void record_stage_transition(CaseId case_id, CaseStage from, CaseStage to, SimTime now);
    CaseStage stage(CaseId case_id) const;

    bool has_case(CaseId case_id) const { return cases_.count(case_id) > 0; }
    const Contribution& contribution(ContribId contrib_id) const;
    std::uint64_t version(CaseId case_id) const;
    const std::vector<ContribId>& merged_log(CaseId case_id) const;
    SimTime enrolled_at(CaseId case_id) const;
    std::optional<SubjectId> manager_of(CaseId case_id) const;
    const AccessPolicy& policy(CaseId case_id) const;
    CaseRecordView snapshot(CaseId case_id) const;
    const AuditTrail& audit() const { return audit_; }
    std::vector<CaseId> case_ids() const;

    static std::string case_label(CaseId case_id) { return "C" + std::to_string(case_id); }

private:
    struct SectionState {
        std::string merged;    // canonical, updated at merge
        std::string delivered; // what readers currently see
    };

    struct CaseState {
        CaseId case_id = 0;
        std::string patient_bio;
        std::string medical_history;
        std::string caretaker_details;
        SimTime enrolled_at;
        CaseStage stage = CaseStage::Enrolled;
        std::optional<SubjectId> manager;
        SubjectId patient = 0;
        SubjectId caretaker = 0;
        std::uint64_t version = 0;
        std::vector<ContribId> merged_log;
        std::map<Section, SectionState> sections;
        AccessPolicy policy;
    };

    CaseState& require_case(CaseId case_id);
    const CaseState& require_case(CaseId case_id) const;
    Contribution& require_contribution(ContribId contrib_id);
    void schedule_validation(const Contribution& contrib, SimTime now);
    void audit_transition(SimTime now, CaseId case_id, ContribId contrib_id, SubjectId actor,
                          std::string action, std::string old_state, std::string new_state);

    Dispatcher& bus_;
    MetricsCollector* metrics_;
    AuditTrail audit_;
    DeliveryPolicy delivery_;
    double feedback_latency_s_ = 15.0;
    double validation_latency_s_ = 1440.0;
    std::map<CaseId, CaseState> cases_;
    std::map<ContribId, Contribution> contributions_;
    std::map<SubjectId, Role> subjects_;
    std::vector<SubjectId> administrators_;
    std::function<void(ContribId, SimTime)> on_validation_due_;
    std::function<void(ContribId, SimTime)> on_flag_notice_;
    CaseId next_case_ = 1;
    ContribId next_contrib_ = 1;
    SubjectId next_subject_ = 1;
};

} // namespace ccsim
