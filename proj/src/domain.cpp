#include "ccsim/domain.hpp"

namespace ccsim {

const char* role_name(Role role) {
    switch (role) {
        case Role::CaseManager: return "CaseManager";
        case Role::Nurse: return "Nurse";
        case Role::LabTechnician: return "LabTechnician";
        case Role::AlliedHealth: return "AlliedHealth";
        case Role::Patient: return "Patient";
        case Role::Caretaker: return "Caretaker";
        case Role::Administrator: return "Administrator";
        case Role::PsychoSocial: return "PsychoSocial";
    }
    return "?";
}

const char* section_name(Section section) {
    switch (section) {
        case Section::LabResults: return "LabResults";
        case Section::TreatmentPlan: return "TreatmentPlan";
        case Section::TeamDetails: return "TeamDetails";
        case Section::Appointments: return "Appointments";
        case Section::ProgressSummary: return "ProgressSummary";
        case Section::CounsellingNotes: return "CounsellingNotes";
        case Section::FullRecord: return "FullRecord";
    }
    return "?";
}

const char* stage_name(CaseStage stage) {
    switch (stage) {
        case CaseStage::Enrolled: return "Enrolled";
        case CaseStage::Diagnosis: return "Diagnosis";
        case CaseStage::InformationGathering: return "InformationGathering";
        case CaseStage::IteratingSolutions: return "IteratingSolutions";
        case CaseStage::TreatmentAssessment: return "TreatmentAssessment";
        case CaseStage::Closed: return "Closed";
    }
    return "?";
}

const char* right_name(Right right) {
    return right == Right::Read ? "Read" : "Write";
}

std::optional<Role> role_from_name(const std::string& name) {
    for (Role r : all_roles())
        if (name == role_name(r)) return r;
    return std::nullopt;
}

std::optional<CaseStage> stage_from_name(const std::string& name) {
    for (CaseStage s : all_stages())
        if (name == stage_name(s)) return s;
    return std::nullopt;
}

std::optional<Section> role_home_section(Role role) {
    switch (role) {
        case Role::CaseManager: return Section::FullRecord;
        case Role::Nurse: return Section::TreatmentPlan;
        case Role::LabTechnician: return Section::LabResults;
        case Role::AlliedHealth: return Section::ProgressSummary;
        case Role::PsychoSocial: return Section::CounsellingNotes;
        case Role::Patient:
        case Role::Caretaker:
        case Role::Administrator:
            return std::nullopt;
    }
    return std::nullopt;
}

bool default_access(Role role, Section section, Right right) {
    // The four sections the patient side may view.
    const bool patient_view = section == Section::LabResults || section == Section::TreatmentPlan ||
                              section == Section::TeamDetails || section == Section::Appointments;
    switch (role) {
        case Role::CaseManager:
            return true; // read and write everywhere, the record's owner
        case Role::Nurse:
            if (right == Right::Write) return section == Section::TreatmentPlan;
            return patient_view;
        case Role::LabTechnician:
            if (right == Right::Write) return section == Section::LabResults;
            return patient_view;
        case Role::AlliedHealth:
            if (right == Right::Write) return section == Section::ProgressSummary;
            return patient_view;
        case Role::Patient:
        case Role::Caretaker:
            return right == Right::Read && patient_view;
        case Role::Administrator:
            return right == Right::Read &&
                   (section == Section::ProgressSummary || section == Section::TeamDetails);
        case Role::PsychoSocial:
            if (right == Right::Write) return section == Section::CounsellingNotes;
            return section == Section::ProgressSummary;
    }
    return false;
}

} // namespace ccsim
