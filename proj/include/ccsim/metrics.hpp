#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccsim/calendar.hpp"
#include "ccsim/domain.hpp"

namespace ccsim {

/// Delay categories measured in-system. The first two follow the clinical
/// delay taxonomy (evaluation/diagnosis and treatment access); the last two
/// measure the collaboration mechanics themselves.
enum class DelayKind : std::uint8_t {
    ClinicalEvaluationDelay,
    TreatmentAccessDelay,
    InfoAvailabilityDelay,
    SubmitToMergeDelay,
};
constexpr std::size_t kDelayKindCount = 4;

const char* delay_kind_name(DelayKind kind);

struct DelaySample {
    CaseId case_id = 0;
    DelayKind kind = DelayKind::InfoAvailabilityDelay;
    double duration_s = 0.0;
};

/// count/mean/p50/p95/max over a sample set; percentiles are nearest-rank.
struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double max = 0.0;

    static SummaryStats of(std::vector<double> values);
};

/// Collects everything a run measures, in emission order.
class MetricsCollector {
public:
    void record_delay(CaseId case_id, DelayKind kind, double duration_s);
    void record_arrival(CaseId case_id) { ++arrivals_; (void)case_id; }
    void record_close(CaseId case_id, double total_duration_s, std::string stage_path);
    void record_conflict(const ConflictReport& report) { conflicts_.push_back(report); }

    const std::vector<DelaySample>& samples() const { return samples_; }
    std::vector<double> durations(DelayKind kind) const;
    SummaryStats stats(DelayKind kind) const { return SummaryStats::of(durations(kind)); }

    std::uint64_t arrivals() const { return arrivals_; }
    std::uint64_t closed_cases() const { return closed_; }
    const std::vector<double>& total_durations() const { return total_durations_; }
    const std::map<std::string, std::uint64_t>& stage_path_histogram() const { return paths_; }
    const std::vector<ConflictReport>& conflicts() const { return conflicts_; }

    /// Raw export: `case_id,kind,duration_s` lines under a header row.
    std::string export_samples_csv() const;

private:
    std::vector<DelaySample> samples_;
    std::vector<double> total_durations_;
    std::map<std::string, std::uint64_t> paths_;
    std::vector<ConflictReport> conflicts_;
    std::uint64_t arrivals_ = 0;
    std::uint64_t closed_ = 0;
};

} // namespace ccsim
