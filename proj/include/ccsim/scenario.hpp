#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ccsim/config.hpp"
#include "ccsim/metrics.hpp"
#include "ccsim/resource.hpp"

namespace ccsim {

/// Everything one run produces. The csv/report strings are the canonical
/// exports; statistics are recomputable from the samples alone.
struct RunResult {
    std::string digest;
    std::uint64_t arrivals = 0;
    std::uint64_t closed = 0;
    std::vector<DelaySample> samples;
    std::array<SummaryStats, kDelayKindCount> stats{};
    std::map<std::string, std::uint64_t> stage_paths;
    std::vector<UtilizationRecord> utilization;
    std::vector<std::string> bottlenecks;
    std::string samples_csv;
    std::string report_text;
    std::string trace_tsv; // populated only when tracing was requested
};

/// The Poisson (or explicit) arrival instants a config implies, identical to
/// the schedule the run itself uses.
std::vector<double> generate_arrivals(const ScenarioConfig& cfg);

/// Drives every arriving case through enrollment, team formation, staged
/// progression, contributions, and closure, then assembles the report.
RunResult run_scenario(const ScenarioConfig& cfg, bool with_trace = false);

/// run_scenario with the delivery strategy overridden.
RunResult simulate_strategy(const ScenarioConfig& cfg, DeliveryPolicy::Strategy strategy,
                            bool with_trace = false);

/// One delay kind's aggregate across a strategy's pooled samples.
struct StrategyStats {
    SummaryStats vcs;
    SummaryStats baseline;
    double mean_difference = 0.0; // baseline - vcs
    double mean_ratio = 0.0;      // baseline / vcs, 0 when undefined
};

struct Comparison {
    std::array<StrategyStats, kDelayKindCount> by_kind{};
    /// Per paired run: (vcs, baseline) mean availability delay, for
    /// directional checks.
    std::vector<std::pair<double, double>> availability_means;
    std::string csv;
};

/// Paired-seed comparison: run i uses seed base+i for both strategies.
Comparison compare_strategies(const ScenarioConfig& cfg, int n_runs);

struct SweepRow {
    double value = 0.0;
    std::array<double, kDelayKindCount> mean_delay_s{};
    std::vector<UtilizationRecord> utilization; // averaged across the runs
};

struct Sweep {
    std::string parameter;
    std::vector<SweepRow> rows;
    std::string csv;
};

/// Reruns the scenario once per value, n_runs paired seeds each. Parameters:
/// arrival_rate (cases/day), feedback_latency, validation_latency, p_flag
/// (all in base units) and capacity:<resource>.
Sweep sensitivity_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                        const std::vector<double>& values, int n_runs);

/// Applies a sweep parameter to a config copy; UnknownParameter otherwise.
void apply_parameter(ScenarioConfig& cfg, const std::string& parameter, double value);

/// Writes content to path via a temporary file and rename, so failures never
/// leave a truncated file behind.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace ccsim
