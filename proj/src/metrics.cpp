#include "ccsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccsim/time.hpp"

namespace ccsim {

const char* delay_kind_name(DelayKind kind) {
    switch (kind) {
    case DelayKind::ClinicalEvaluationDelay: return "ClinicalEvaluationDelay";
    case DelayKind::TreatmentAccessDelay: return "TreatmentAccessDelay";
    case DelayKind::InfoAvailabilityDelay: return "InfoAvailabilityDelay";
    case DelayKind::SubmitToMergeDelay: return "SubmitToMergeDelay";
    }
    return "?";
}

SummaryStats SummaryStats::of(std::vector<double> values) {
    SummaryStats out;
    out.count = values.size();
    if (values.empty()) {
        return out;
    }
    std::sort(values.begin(), values.end());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) /
               static_cast<double>(values.size());
    // Nearest-rank percentile: the ceil(p*n)-th smallest value.
    auto rank = [&](double p) {
        std::size_t r = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(values.size())));
        return values[std::max<std::size_t>(r, 1) - 1];
    };
    out.p50 = rank(0.50);
    out.p95 = rank(0.95);
    out.max = values.back();
    return out;
}

void MetricsCollector::record_delay(CaseId case_id, DelayKind kind, double duration_s) {
    samples_.push_back(DelaySample{case_id, kind, duration_s});
}

void MetricsCollector::record_close(CaseId case_id, double total_duration_s,
                                    std::string stage_path) {
    (void)case_id;
    ++closed_;
    total_durations_.push_back(total_duration_s);
    ++paths_[std::move(stage_path)];
}

std::vector<double> MetricsCollector::durations(DelayKind kind) const {
    std::vector<double> out;
    for (const DelaySample& s : samples_) {
        if (s.kind == kind) {
            out.push_back(s.duration_s);
        }
    }
    return out;
}

std::string MetricsCollector::export_samples_csv() const {
    std::string out = "case_id,kind,duration_s\n";
    for (const DelaySample& s : samples_) {
        out += std::to_string(s.case_id);
        out += ',';
        out += delay_kind_name(s.kind);
        out += ',';
        out += format_seconds(s.duration_s);
        out += '\n';
    }
    return out;
}

} // namespace ccsim
