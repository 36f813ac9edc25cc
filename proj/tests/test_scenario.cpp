#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ccsim/rng.hpp"
#include "ccsim/scenario.hpp"

using namespace ccsim;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const SimError& e) {
        return e.code();
    }
    FAIL("expected a SimError");
    return ErrorCode::UnknownCase;
}

/// Straight Enrolled→…→Closed walk with pinned dwell times, so every event
/// instant in a run is hand-computable.
TransitionTable straight_table() {
    TransitionTable t;
    t.probabilities[{CaseStage::Enrolled, CaseStage::Diagnosis}] = 1.0;
    t.probabilities[{CaseStage::Diagnosis, CaseStage::InformationGathering}] = 1.0;
    t.probabilities[{CaseStage::InformationGathering, CaseStage::IteratingSolutions}] = 1.0;
    t.probabilities[{CaseStage::IteratingSolutions, CaseStage::TreatmentAssessment}] = 1.0;
    t.probabilities[{CaseStage::TreatmentAssessment, CaseStage::Closed}] = 1.0;
    t.dwell_mean_s[CaseStage::Diagnosis] = 100.0;
    t.dwell_mean_s[CaseStage::InformationGathering] = 200.0;
    t.dwell_mean_s[CaseStage::IteratingSolutions] = 300.0;
    t.dwell_mean_s[CaseStage::TreatmentAssessment] = 400.0;
    t.fixed_dwell = true;
    return t;
}

/// One case, no contention, no flags: the fully hand-traceable workload.
ScenarioConfig single_case_config() {
    ScenarioConfig cfg;
    cfg.seed = 7;
    cfg.horizon_s = kSecondsPerDay;
    cfg.explicit_arrivals_s = {0.0};
    cfg.p_flag = 0.0;
    cfg.table = straight_table();
    cfg.pool_counts = {{Role::CaseManager, 1}, {Role::Nurse, 1}, {Role::LabTechnician, 1}};
    return cfg;
}

std::vector<double> durations_of(const RunResult& r, DelayKind kind) {
    std::vector<double> out;
    for (const auto& s : r.samples)
        if (s.kind == kind) out.push_back(s.duration_s);
    return out;
}

} // namespace

TEST_CASE("a single uncontended case merges 1455 s after each submission") {
    RunResult r = run_scenario(single_case_config());

    CHECK(r.arrivals == 1);
    CHECK(r.closed == 1);

    // Stage completions at 100/300/600/1000 each submit one contribution;
    // validation lands 1440 s later and the merge 15 s after that.
    auto merges = durations_of(r, DelayKind::SubmitToMergeDelay);
    REQUIRE(merges.size() == 4);
    for (double d : merges) CHECK(d == 1455.0);

    auto availability = durations_of(r, DelayKind::InfoAvailabilityDelay);
    REQUIRE(availability.size() == 4);
    for (double d : availability) CHECK(d == 15.0);

    // Diagnosis entered at 0, information gathering left at 300.
    auto evaluation = durations_of(r, DelayKind::ClinicalEvaluationDelay);
    REQUIRE(evaluation.size() == 1);
    CHECK(evaluation[0] == 300.0);

    // The treatment room is idle, so the grant is immediate on stage entry.
    auto access = durations_of(r, DelayKind::TreatmentAccessDelay);
    REQUIRE(access.size() == 1);
    CHECK(access[0] == 0.0);

    REQUIRE(r.stage_paths.size() == 1);
    const auto& [path, count] = *r.stage_paths.begin();
    CHECK(path == "Enrolled>Diagnosis>InformationGathering>IteratingSolutions>"
                  "TreatmentAssessment>Closed");
    CHECK(count == 1);

    // The room was held for exactly the 400 s treatment stage.
    REQUIRE(r.utilization.size() == 1);
    CHECK(r.utilization[0].resource_id == "treatment_room");
    CHECK(r.utilization[0].busy_time_s == doctest::Approx(400.0));
    CHECK(r.utilization[0].max_queue_len == 0);
    CHECK(r.bottlenecks.empty());
}

TEST_CASE("the baseline strategy holds each merge until the next weekly tick") {
    ScenarioConfig cfg = single_case_config();
    RunResult r = simulate_strategy(cfg, DeliveryPolicy::Strategy::Baseline);

    // Merges land at 1555/1755/2055/2455; the first sync tick is at 604800.
    auto availability = durations_of(r, DelayKind::InfoAvailabilityDelay);
    std::sort(availability.begin(), availability.end());
    REQUIRE(availability.size() == 4);
    CHECK(availability[0] == 604800.0 - 2455.0);
    CHECK(availability[1] == 604800.0 - 2055.0);
    CHECK(availability[2] == 604800.0 - 1755.0);
    CHECK(availability[3] == 604800.0 - 1555.0);

    // Everything that is not delivery timing is untouched by the strategy.
    auto merges = durations_of(r, DelayKind::SubmitToMergeDelay);
    REQUIRE(merges.size() == 4);
    for (double d : merges) CHECK(d == 1455.0);
}

TEST_CASE("strategies differ only in delivery timing under a shared seed") {
    ScenarioConfig cfg;
    cfg.seed = 11;
    cfg.horizon_s = 30.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 3.0;

    RunResult vcs = simulate_strategy(cfg, DeliveryPolicy::Strategy::VcsModel);
    RunResult baseline = simulate_strategy(cfg, DeliveryPolicy::Strategy::Baseline);

    CHECK(vcs.arrivals == baseline.arrivals);
    CHECK(vcs.closed == baseline.closed);
    CHECK(vcs.stage_paths == baseline.stage_paths);
    CHECK(durations_of(vcs, DelayKind::SubmitToMergeDelay) ==
          durations_of(baseline, DelayKind::SubmitToMergeDelay));
    CHECK(durations_of(vcs, DelayKind::ClinicalEvaluationDelay) ==
          durations_of(baseline, DelayKind::ClinicalEvaluationDelay));
    CHECK(durations_of(vcs, DelayKind::TreatmentAccessDelay) ==
          durations_of(baseline, DelayKind::TreatmentAccessDelay));
    REQUIRE(vcs.utilization.size() == baseline.utilization.size());
    for (std::size_t i = 0; i < vcs.utilization.size(); ++i) {
        CHECK(vcs.utilization[i].busy_time_s ==
              doctest::Approx(baseline.utilization[i].busy_time_s));
        CHECK(vcs.utilization[i].max_queue_len == baseline.utilization[i].max_queue_len);
    }
    CHECK(durations_of(vcs, DelayKind::InfoAvailabilityDelay) !=
          durations_of(baseline, DelayKind::InfoAvailabilityDelay));
}

TEST_CASE("identical config and seed reproduce the exports byte for byte") {
    ScenarioConfig cfg;
    cfg.seed = 31;
    cfg.horizon_s = 20.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 4.0;

    RunResult a = run_scenario(cfg, true);
    RunResult b = run_scenario(cfg, true);
    CHECK(a.samples_csv == b.samples_csv);
    CHECK(a.trace_tsv == b.trace_tsv);
    CHECK(a.report_text == b.report_text);
    CHECK(!a.trace_tsv.empty());

    ScenarioConfig other = cfg;
    other.seed = 32;
    RunResult c = run_scenario(other, true);
    CHECK(a.samples_csv != c.samples_csv);
}

TEST_CASE("a zero arrival rate yields an empty report") {
    ScenarioConfig cfg;
    cfg.arrival_rate_per_day = 0.0;
    cfg.horizon_s = 10.0 * kSecondsPerDay;

    RunResult r = run_scenario(cfg);
    CHECK(r.arrivals == 0);
    CHECK(r.closed == 0);
    CHECK(r.samples.empty());
    CHECK(r.samples_csv == "case_id,kind,duration_s\n");
    CHECK(r.stage_paths.empty());
    CHECK(r.report_text.find("arrivals: 0") != std::string::npos);
}

TEST_CASE("every sample is nonnegative and tied to an enrolled case") {
    ScenarioConfig cfg;
    cfg.seed = 5;
    cfg.horizon_s = 40.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 5.0;
    cfg.p_flag = 0.3; // exercise the flag/resubmit loop as well

    RunResult r = run_scenario(cfg);
    CHECK(r.arrivals > 50);
    for (const auto& s : r.samples) {
        CHECK(s.duration_s >= 0.0);
        CHECK(s.case_id >= 1);
        CHECK(s.case_id <= r.arrivals);
    }
}

TEST_CASE("report statistics match an independent pass over the raw samples") {
    ScenarioConfig cfg;
    cfg.seed = 17;
    cfg.horizon_s = 30.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 4.0;

    RunResult r = run_scenario(cfg);
    CHECK(r.report_text.find("config_digest: " + cfg.digest()) != std::string::npos);

    for (std::size_t k = 0; k < kDelayKindCount; ++k) {
        auto values = durations_of(r, static_cast<DelayKind>(k));
        std::sort(values.begin(), values.end());
        const SummaryStats& s = r.stats[k];
        REQUIRE(s.count == values.size());
        if (values.empty()) continue;
        double sum = 0.0;
        for (double v : values) sum += v;
        CHECK(s.mean == doctest::Approx(sum / static_cast<double>(values.size())));
        auto nearest_rank = [&](double p) {
            std::size_t rank = static_cast<std::size_t>(
                std::ceil(p * static_cast<double>(values.size())));
            return values[std::max<std::size_t>(rank, 1) - 1];
        };
        CHECK(s.p50 == doctest::Approx(nearest_rank(0.50)));
        CHECK(s.p95 == doctest::Approx(nearest_rank(0.95)));
        CHECK(s.max == doctest::Approx(values.back()));
    }
}

TEST_CASE("the arrival schedule is regenerable and respects the horizon") {
    ScenarioConfig cfg;
    cfg.seed = 99;
    cfg.horizon_s = 90.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 6.0;

    auto a = generate_arrivals(cfg);
    auto b = generate_arrivals(cfg);
    CHECK(a == b);
    CHECK(std::is_sorted(a.begin(), a.end()));
    REQUIRE(!a.empty());
    CHECK(a.back() <= cfg.horizon_s);
    // 6/day over 90 days: the count should land near 540 (within 5 sigma).
    CHECK(a.size() > 540 - 5 * 24);
    CHECK(a.size() < 540 + 5 * 24);

    cfg.explicit_arrivals_s = {5.0, 1.0, 2.0 * cfg.horizon_s};
    auto expl = generate_arrivals(cfg);
    CHECK(expl == std::vector<double>{1.0, 5.0});
}

TEST_CASE("uniformly spread merges see about half a sync interval of delay") {
    DeliveryPolicy policy;
    policy.strategy = DeliveryPolicy::Strategy::Baseline;
    const double w = policy.baseline_sync_interval_s;

    RandomStream rng(2024);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        SimTime merged(rng.uniform(0.0, 25.0 * w));
        sum += policy.delivery_time(merged) - merged;
    }
    const double mean = sum / n;
    CHECK(mean > 0.98 * w / 2.0);
    CHECK(mean < 1.02 * w / 2.0);
}

TEST_CASE("paired comparison shows the push model beating weekly batching") {
    ScenarioConfig cfg;
    cfg.seed = 300;
    cfg.horizon_s = 30.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 3.0;

    Comparison cmp = compare_strategies(cfg, 3);
    REQUIRE(cmp.availability_means.size() == 3);
    for (const auto& [vcs_mean, baseline_mean] : cmp.availability_means) {
        CHECK(vcs_mean > 0.0);
        CHECK(vcs_mean < baseline_mean);
    }

    const auto& info = cmp.by_kind[static_cast<std::size_t>(DelayKind::InfoAvailabilityDelay)];
    CHECK(info.vcs.mean == doctest::Approx(15.0));
    CHECK(info.mean_difference > 0.0);
    CHECK(info.mean_ratio > 1.0);

    // Non-delivery kinds are identical under paired seeds.
    const auto& merge = cmp.by_kind[static_cast<std::size_t>(DelayKind::SubmitToMergeDelay)];
    CHECK(merge.vcs.mean == doctest::Approx(merge.baseline.mean));
    CHECK(merge.mean_ratio == doctest::Approx(1.0));

    // Header plus one row per delay kind.
    CHECK(std::count(cmp.csv.begin(), cmp.csv.end(), '\n') == 1 + kDelayKindCount);
    CHECK(cmp.csv.rfind("kind,vcs_count,vcs_mean,vcs_p95,", 0) == 0);
}

TEST_CASE("a single-run comparison is still well formed") {
    ScenarioConfig cfg = single_case_config();
    Comparison cmp = compare_strategies(cfg, 1);
    REQUIRE(cmp.availability_means.size() == 1);
    CHECK(cmp.availability_means[0].first == doctest::Approx(15.0));
    CHECK(cmp.availability_means[0].second > 600000.0);
}

TEST_CASE("with the sync interval at twice the push latency the means agree") {
    ScenarioConfig cfg;
    cfg.seed = 320;
    cfg.horizon_s = 30.0 * kSecondsPerDay;
    cfg.arrival_rate_per_day = 4.0;
    // Batching at interval w delays a uniformly placed merge by w/2 on
    // average, so the strategies meet when w = 2 * feedback latency.
    cfg.baseline_sync_interval_s = 2.0 * cfg.feedback_latency_s;

    Comparison cmp = compare_strategies(cfg, 4);
    const auto& info = cmp.by_kind[static_cast<std::size_t>(DelayKind::InfoAvailabilityDelay)];
    CHECK(info.baseline.mean == doctest::Approx(info.vcs.mean).epsilon(0.05));
}

TEST_CASE("sweeping the validation latency shifts the merge delay additively") {
    ScenarioConfig cfg = single_case_config();
    Sweep sweep = sensitivity_sweep(cfg, "validation_latency", {0.0, 1440.0, 2880.0}, 1);

    REQUIRE(sweep.rows.size() == 3);
    const auto kind = static_cast<std::size_t>(DelayKind::SubmitToMergeDelay);
    CHECK(sweep.rows[0].mean_delay_s[kind] == doctest::Approx(15.0));
    CHECK(sweep.rows[1].mean_delay_s[kind] == doctest::Approx(1455.0));
    CHECK(sweep.rows[2].mean_delay_s[kind] == doctest::Approx(2895.0));
}

TEST_CASE("raising the arrival rate never shortens the queue wait") {
    ScenarioConfig cfg;
    cfg.seed = 77;
    cfg.horizon_s = 60.0 * kSecondsPerDay;
    cfg.table.fixed_dwell = true;
    cfg.table.dwell_mean_s[CaseStage::TreatmentAssessment] = 2.0 * kSecondsPerDay;
    cfg.resources = {{"treatment_room", ResourceKind::Facility, 1}};

    Sweep sweep = sensitivity_sweep(cfg, "arrival_rate", {0.5, 2.0}, 2);
    REQUIRE(sweep.rows.size() == 2);
    REQUIRE(sweep.rows[0].utilization.size() == 1);
    CHECK(sweep.rows[0].utilization[0].mean_wait_s <= sweep.rows[1].utilization[0].mean_wait_s);
    CHECK(sweep.rows[1].utilization[0].mean_wait_s > 0.0);
    CHECK(sweep.rows[0].utilization[0].utilization <= 1.0);
    CHECK(sweep.rows[1].utilization[0].utilization <= 1.0);
}

TEST_CASE("sweep rejects unknown parameters and empty value lists are vacuous") {
    ScenarioConfig cfg = single_case_config();
    CHECK(code_of([&] { sensitivity_sweep(cfg, "warp_factor", {1.0}, 1); }) ==
          ErrorCode::UnknownParameter);
    CHECK(code_of([&] { sensitivity_sweep(cfg, "capacity:xray", {1.0}, 1); }) ==
          ErrorCode::UnknownParameter);

    Sweep empty = sensitivity_sweep(cfg, "p_flag", {}, 1);
    CHECK(empty.rows.empty());
    CHECK(std::count(empty.csv.begin(), empty.csv.end(), '\n') == 1);

    Sweep cap = sensitivity_sweep(cfg, "capacity:treatment_room", {2.0}, 1);
    REQUIRE(cap.rows.size() == 1);
    CHECK(cap.rows[0].value == doctest::Approx(2.0));
}

TEST_CASE("atomic writes leave the final file and remove the staging file") {
    const std::string path = "/tmp/ccsim_scenario_write_test.txt";
    write_file_atomic(path, "payload\n");
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == "payload\n");
    std::ifstream tmp(path + ".tmp");
    CHECK(!tmp.good());
    std::remove(path.c_str());
}
