#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace ccsim {

using SubjectId = std::uint32_t;
using CaseId = std::uint64_t;
using ContribId = std::uint64_t;

enum class Role : std::uint8_t {
    CaseManager,
    Nurse,
    LabTechnician,
    AlliedHealth,
    Patient,
    Caretaker,
    Administrator,
    PsychoSocial,
};
constexpr std::size_t kRoleCount = 8;

enum class Section : std::uint8_t {
    LabResults,
    TreatmentPlan,
    TeamDetails,
    Appointments,
    ProgressSummary,
    CounsellingNotes,
    FullRecord,
};
constexpr std::size_t kSectionCount = 7;

enum class Right : std::uint8_t { Read, Write };

enum class CaseStage : std::uint8_t {
    Enrolled,
    Diagnosis,
    InformationGathering,
    IteratingSolutions,
    TreatmentAssessment,
    Closed,
};
constexpr std::size_t kStageCount = 6;

const char* role_name(Role role);
const char* section_name(Section section);
const char* stage_name(CaseStage stage);
const char* right_name(Right right);
std::optional<Role> role_from_name(const std::string& name);
std::optional<CaseStage> stage_from_name(const std::string& name);

constexpr std::array<Role, kRoleCount> all_roles() {
    return {Role::CaseManager, Role::Nurse,     Role::LabTechnician, Role::AlliedHealth,
            Role::Patient,     Role::Caretaker, Role::Administrator, Role::PsychoSocial};
}

constexpr std::array<Section, kSectionCount> all_sections() {
    return {Section::LabResults,      Section::TreatmentPlan,    Section::TeamDetails,
            Section::Appointments,    Section::ProgressSummary,  Section::CounsellingNotes,
            Section::FullRecord};
}

constexpr std::array<CaseStage, kStageCount> all_stages() {
    return {CaseStage::Enrolled,           CaseStage::Diagnosis,
            CaseStage::InformationGathering, CaseStage::IteratingSolutions,
            CaseStage::TreatmentAssessment, CaseStage::Closed};
}

/// The section a contributing role writes to. Read-only stakeholders have none.
std::optional<Section> role_home_section(Role role);

/// The baseline per-role access table applied when a subject joins a case.
/// Absence of a grant is denial; everything beyond this table is granted
/// at the case manager's discretion during a run.
bool default_access(Role role, Section section, Right right);

} // namespace ccsim
