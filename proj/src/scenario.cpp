#include "ccsim/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <memory>
#include <sstream>
#include <utility>

#include "ccsim/collaboration.hpp"
#include "ccsim/dispatcher.hpp"
#include "ccsim/engine.hpp"
#include "ccsim/record.hpp"
#include "ccsim/rng.hpp"

namespace ccsim {

namespace {

std::string format_ratio(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// One fully wired run: engine, case store, workflow, and resource pool built
/// from the config, plus the driver callbacks that connect them. Each instance
/// owns independent state, so runs can execute on separate threads.
class ScenarioRun {
public:
    ScenarioRun(const ScenarioConfig& cfg, bool with_trace)
        : cfg_(cfg),
          flow_rng_(RandomStream::derive(cfg.seed, stream::kFlow)),
          bus_(engine_),
          store_(bus_, &metrics_),
          flow_(bus_, store_, &metrics_),
          pool_(bus_) {
        if (with_trace) {
            engine_.set_trace_sink([this](const Event& ev) {
                trace_ << format_seconds(ev.time) << '\t' << event_kind_name(ev.kind) << '\t'
                       << ev.target << '\t' << ev.aux << '\t' << ev.priority << '\t' << ev.seq
                       << '\n';
            });
        }

        store_.set_latencies(cfg_.feedback_latency_s, cfg_.validation_latency_s);
        DeliveryPolicy delivery;
        delivery.strategy = cfg_.strategy;
        delivery.feedback_latency_s = cfg_.feedback_latency_s;
        delivery.baseline_sync_interval_s = cfg_.baseline_sync_interval_s;
        store_.set_delivery_policy(delivery);
        store_.set_validation_handler(
            [this](ContribId id, SimTime now) { on_validation_due(id, now); });
        store_.set_flag_notice_handler(
            [this](ContribId id, SimTime now) { on_flag_notice(id, now); });

        flow_.set_table(cfg_.table);
        flow_.set_feedback_latency(cfg_.feedback_latency_s);
        flow_.set_response_delay(cfg_.response_delay_s);
        flow_.set_stage_entry_handler(
            [this](CaseId id, CaseStage stage, SimTime now) { on_stage_entry(id, stage, now); });
        flow_.set_stage_completion_handler(
            [this](CaseId id, SimTime now) { on_stage_completion(id, now); });

        register_roster();
        for (const auto& spec : cfg_.resources)
            pool_.add_resource(spec.name, spec.kind, spec.capacity);
    }

    RunResult execute() {
        for (double at : generate_arrivals(cfg_)) {
            bus_.schedule(SimTime(at), EventKind::CaseArrival, "intake", 0,
                          [this](const Event& ev) { start_case(ev.time); });
        }
        try {
            bus_.run_until(SimTime(cfg_.horizon_s));
        } catch (const SimError& e) {
            throw SimError(e.code(), std::string(e.what()) + " (event time " +
                                         format_seconds(engine_.now()) + ")");
        }
        pool_.finish(SimTime(cfg_.horizon_s));
        return assemble();
    }

private:
    /// A case's claim on its stage-bound resource. When the stage ends before
    /// the grant arrives, the claim is abandoned and the eventual grant is
    /// returned immediately.
    struct Hold {
        std::uint64_t ticket = 0;
        bool granted = false;
        bool abandoned = false;
    };

    void register_roster() {
        std::vector<SubjectId> admins;
        for (Role role : all_roles()) {
            auto it = cfg_.pool_counts.find(role);
            if (it == cfg_.pool_counts.end()) continue;
            for (int i = 0; i < it->second; ++i) {
                SubjectId id = store_.register_subject(role);
                if (role == Role::Administrator)
                    admins.push_back(id);
                else
                    roster_.emplace_back(id, role);
            }
        }
        store_.set_administrators(std::move(admins));
    }

    void start_case(SimTime now) {
        const std::uint64_t n = ++case_counter_;
        EnrollmentInfo info = store_.enroll_case("patient P" + std::to_string(n), "",
                                                 "caretaker K" + std::to_string(n), now);
        metrics_.record_arrival(info.case_id);
        flow_.establish_core_team(info.case_id, roster_, cfg_.core_fraction, flow_rng_, now);
        flow_.open_collaboration(info.case_id, now);
        advance(info.case_id, now);
    }

    void advance(CaseId case_id, SimTime now) {
        CaseStage next = flow_.advance_stage(case_id, flow_rng_, now);
        if (next == CaseStage::Closed && store_.stage(case_id) == CaseStage::TreatmentAssessment)
            flow_.close_case(case_id, now);
    }

    void on_stage_entry(CaseId case_id, CaseStage stage, SimTime now) {
        auto bound = cfg_.stage_resources.find(stage);
        if (bound == cfg_.stage_resources.end()) return;
        auto hold = std::make_shared<Hold>();
        const bool treatment = stage == CaseStage::TreatmentAssessment;
        const double remaining = cfg_.horizon_s - now.seconds() + 1.0;
        auto on_grant = [this, case_id, treatment, hold](std::uint64_t ticket, SimTime at) {
            hold->ticket = ticket;
            hold->granted = true;
            if (hold->abandoned) {
                pool_.release(ticket, at);
                return;
            }
            if (treatment) flow_.note_treatment_grant(case_id, at);
        };
        ResourcePool::Ticket ticket = pool_.request(bound->second, 1,
                                                    CaseStore::case_label(case_id), remaining, now,
                                                    on_grant);
        hold->ticket = ticket.id;
        active_hold_[case_id] = hold;
    }

    void on_stage_completion(CaseId case_id, SimTime now) {
        auto held = active_hold_.find(case_id);
        if (held != active_hold_.end()) {
            Hold& h = *held->second;
            if (h.granted)
                pool_.release(h.ticket, now);
            else
                h.abandoned = true;
            active_hold_.erase(held);
        }
        submit_round(case_id, now);
        advance(case_id, now);
    }

    void submit_round(CaseId case_id, SimTime now) {
        const CoreTeam& team = flow_.team(case_id);
        std::vector<std::pair<SubjectId, Section>> authors;
        if (auto home = role_home_section(store_.subject_role(team.leader)))
            authors.emplace_back(team.leader, *home);
        for (const auto& [member, role] : team.members)
            if (auto home = role_home_section(role)) authors.emplace_back(member, *home);
        if (authors.empty()) return;
        for (int i = 0; i < cfg_.contributions_per_stage; ++i) {
            const auto& [author, section] = authors[flow_rng_.pick(authors.size())];
            const std::uint64_t n = ++update_counter_[case_id];
            store_.submit_contribution(case_id, author, section,
                                       "update " + std::to_string(n), now);
        }
    }

    void on_validation_due(ContribId contrib_id, SimTime now) {
        const Contribution& contrib = store_.contribution(contrib_id);
        auto manager = store_.manager_of(contrib.case_id);
        if (!manager) return;
        const SubjectId reviewer = *manager;
        Verdict verdict = flow_rng_.bernoulli(cfg_.p_flag) ? Verdict::Irregular : Verdict::Ok;
        ContributionStatus status = store_.validate(contrib_id, reviewer, verdict, now);
        if (status != ContributionStatus::Approved) return;
        // The approval notice travels back through the same feedback channel;
        // the merge lands when it arrives.
        bus_.schedule(now + cfg_.feedback_latency_s, EventKind::RequestDelivered,
                      CaseStore::case_label(contrib.case_id), contrib_id,
                      [this, contrib_id, reviewer](const Event& ev) {
                          store_.approve_and_merge(contrib_id, reviewer, ev.time);
                      });
    }

    void on_flag_notice(ContribId contrib_id, SimTime now) {
        const Contribution& contrib = store_.contribution(contrib_id);
        store_.resubmit(contrib_id, contrib.author,
                        contrib.payload + " rev" + std::to_string(contrib.revision + 1), now);
    }

    RunResult assemble() {
        RunResult out;
        out.digest = cfg_.digest();
        out.arrivals = metrics_.arrivals();
        out.closed = metrics_.closed_cases();
        out.samples = metrics_.samples();
        for (std::size_t k = 0; k < kDelayKindCount; ++k)
            out.stats[k] = metrics_.stats(static_cast<DelayKind>(k));
        out.stage_paths = metrics_.stage_path_histogram();
        out.utilization = pool_.all_reports();
        out.bottlenecks = ResourcePool::detect_bottlenecks(
            out.utilization, cfg_.bottleneck_threshold, cfg_.bottleneck_wait_ceiling_s);
        out.samples_csv = metrics_.export_samples_csv();
        out.report_text = render_report(out);
        out.trace_tsv = trace_.str();
        return out;
    }

    std::string render_report(const RunResult& r) const {
        std::ostringstream os;
        os << "collaboration run report\n";
        os << "config_digest: " << r.digest << '\n';
        os << "horizon_s: " << format_seconds(cfg_.horizon_s) << '\n';
        os << "arrivals: " << r.arrivals << '\n';
        os << "closed_cases: " << r.closed << '\n';
        os << "delays:\n";
        for (std::size_t k = 0; k < kDelayKindCount; ++k) {
            const SummaryStats& s = r.stats[k];
            os << "  " << delay_kind_name(static_cast<DelayKind>(k)) << ": count=" << s.count
               << " mean=" << format_seconds(s.mean) << " p50=" << format_seconds(s.p50)
               << " p95=" << format_seconds(s.p95) << " max=" << format_seconds(s.max) << '\n';
        }
        os << "utilization:\n";
        for (const auto& u : r.utilization) {
            os << "  " << u.resource_id << ": busy_s=" << format_seconds(u.busy_time_s)
               << " utilization=" << format_ratio(u.utilization)
               << " max_queue=" << u.max_queue_len
               << " mean_wait_s=" << format_seconds(u.mean_wait_s) << '\n';
        }
        os << "bottlenecks:";
        if (r.bottlenecks.empty()) os << " none";
        for (const auto& name : r.bottlenecks) os << ' ' << name;
        os << '\n';
        os << "stage_paths:\n";
        for (const auto& [path, count] : r.stage_paths)
            os << "  " << path << ": " << count << '\n';
        return os.str();
    }

    ScenarioConfig cfg_;
    RandomStream flow_rng_;
    Engine engine_;
    Dispatcher bus_;
    MetricsCollector metrics_;
    CaseStore store_;
    Workflow flow_;
    ResourcePool pool_;
    std::vector<std::pair<SubjectId, Role>> roster_;
    std::map<CaseId, std::shared_ptr<Hold>> active_hold_;
    std::map<CaseId, std::uint64_t> update_counter_;
    std::uint64_t case_counter_ = 0;
    std::ostringstream trace_;
};

SummaryStats pooled_stats(const std::vector<RunResult>& runs, DelayKind kind) {
    std::vector<double> values;
    for (const auto& r : runs)
        for (const auto& s : r.samples)
            if (s.kind == kind) values.push_back(s.duration_s);
    return SummaryStats::of(std::move(values));
}

} // namespace

std::vector<double> generate_arrivals(const ScenarioConfig& cfg) {
    std::vector<double> arrivals;
    if (!cfg.explicit_arrivals_s.empty()) {
        for (double at : cfg.explicit_arrivals_s)
            if (at <= cfg.horizon_s) arrivals.push_back(at);
        std::sort(arrivals.begin(), arrivals.end());
        return arrivals;
    }
    if (cfg.arrival_rate_per_day <= 0.0) return arrivals;
    RandomStream rng = RandomStream::derive(cfg.seed, stream::kArrivals);
    const double mean_gap_s = kSecondsPerDay / cfg.arrival_rate_per_day;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(mean_gap_s);
        if (t > cfg.horizon_s) break;
        arrivals.push_back(t);
    }
    return arrivals;
}

RunResult run_scenario(const ScenarioConfig& cfg, bool with_trace) {
    cfg.validate();
    ScenarioRun run(cfg, with_trace);
    return run.execute();
}

RunResult simulate_strategy(const ScenarioConfig& cfg, DeliveryPolicy::Strategy strategy,
                            bool with_trace) {
    ScenarioConfig variant = cfg;
    variant.strategy = strategy;
    return run_scenario(variant, with_trace);
}

Comparison compare_strategies(const ScenarioConfig& cfg, int n_runs) {
    n_runs = std::max(1, n_runs);
    struct Pair {
        RunResult vcs;
        RunResult baseline;
    };
    std::vector<std::future<Pair>> futures;
    futures.reserve(static_cast<std::size_t>(n_runs));
    for (int i = 0; i < n_runs; ++i) {
        ScenarioConfig paired = cfg;
        paired.seed = cfg.seed + static_cast<std::uint64_t>(i);
        futures.push_back(std::async(std::launch::async, [paired] {
            Pair p;
            p.vcs = simulate_strategy(paired, DeliveryPolicy::Strategy::VcsModel);
            p.baseline = simulate_strategy(paired, DeliveryPolicy::Strategy::Baseline);
            return p;
        }));
    }

    std::vector<RunResult> vcs_runs, baseline_runs;
    Comparison out;
    for (auto& f : futures) {
        Pair p = f.get();
        const auto kind = static_cast<std::size_t>(DelayKind::InfoAvailabilityDelay);
        out.availability_means.emplace_back(p.vcs.stats[kind].mean, p.baseline.stats[kind].mean);
        vcs_runs.push_back(std::move(p.vcs));
        baseline_runs.push_back(std::move(p.baseline));
    }

    std::ostringstream csv;
    csv << "kind,vcs_count,vcs_mean,vcs_p95,baseline_count,baseline_mean,baseline_p95,"
           "diff_mean,ratio_mean\n";
    for (std::size_t k = 0; k < kDelayKindCount; ++k) {
        StrategyStats& row = out.by_kind[k];
        row.vcs = pooled_stats(vcs_runs, static_cast<DelayKind>(k));
        row.baseline = pooled_stats(baseline_runs, static_cast<DelayKind>(k));
        row.mean_difference = row.baseline.mean - row.vcs.mean;
        row.mean_ratio = row.vcs.mean > 0.0 ? row.baseline.mean / row.vcs.mean : 0.0;
        csv << delay_kind_name(static_cast<DelayKind>(k)) << ',' << row.vcs.count << ','
            << format_seconds(row.vcs.mean) << ',' << format_seconds(row.vcs.p95) << ','
            << row.baseline.count << ',' << format_seconds(row.baseline.mean) << ','
            << format_seconds(row.baseline.p95) << ',' << format_seconds(row.mean_difference)
            << ',' << format_ratio(row.mean_ratio) << '\n';
    }
    out.csv = csv.str();
    return out;
}

void apply_parameter(ScenarioConfig& cfg, const std::string& parameter, double value) {
    const std::string capacity_prefix = "capacity:";
    if (parameter == "arrival_rate") {
        cfg.arrival_rate_per_day = value;
    } else if (parameter == "feedback_latency") {
        cfg.feedback_latency_s = value;
    } else if (parameter == "validation_latency") {
        cfg.validation_latency_s = value;
    } else if (parameter == "p_flag") {
        cfg.p_flag = value;
    } else if (parameter.rfind(capacity_prefix, 0) == 0) {
        const std::string name = parameter.substr(capacity_prefix.size());
        auto spec = std::find_if(cfg.resources.begin(), cfg.resources.end(),
                                 [&](const auto& r) { return r.name == name; });
        if (spec == cfg.resources.end())
            throw SimError(ErrorCode::UnknownParameter, "no resource named '" + name + "'");
        spec->capacity = static_cast<int>(value);
    } else {
        throw SimError(ErrorCode::UnknownParameter, "unknown sweep parameter '" + parameter + "'");
    }
    cfg.validate();
}

Sweep sensitivity_sweep(const ScenarioConfig& cfg, const std::string& parameter,
                        const std::vector<double>& values, int n_runs) {
    n_runs = std::max(1, n_runs);
    // Validate the parameter name even for an empty value list.
    {
        ScenarioConfig probe = cfg;
        apply_parameter(probe, parameter, values.empty() ? 1.0 : values.front());
    }

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(values.size());
    for (double value : values) {
        futures.push_back(std::async(std::launch::async, [cfg, parameter, value, n_runs] {
            ScenarioConfig varied = cfg;
            apply_parameter(varied, parameter, value);
            std::vector<RunResult> runs;
            runs.reserve(static_cast<std::size_t>(n_runs));
            for (int i = 0; i < n_runs; ++i) {
                ScenarioConfig seeded = varied;
                seeded.seed = varied.seed + static_cast<std::uint64_t>(i);
                runs.push_back(run_scenario(seeded));
            }
            SweepRow row;
            row.value = value;
            for (std::size_t k = 0; k < kDelayKindCount; ++k)
                row.mean_delay_s[k] = pooled_stats(runs, static_cast<DelayKind>(k)).mean;
            // Average the per-run usage summaries resource by resource.
            row.utilization = runs.front().utilization;
            for (auto& u : row.utilization) {
                u.busy_time_s = 0.0;
                u.utilization = 0.0;
                u.mean_wait_s = 0.0;
                u.max_queue_len = 0;
            }
            for (const auto& r : runs) {
                for (std::size_t j = 0; j < row.utilization.size(); ++j) {
                    row.utilization[j].busy_time_s += r.utilization[j].busy_time_s;
                    row.utilization[j].utilization += r.utilization[j].utilization;
                    row.utilization[j].mean_wait_s += r.utilization[j].mean_wait_s;
                    row.utilization[j].max_queue_len =
                        std::max(row.utilization[j].max_queue_len, r.utilization[j].max_queue_len);
                }
            }
            for (auto& u : row.utilization) {
                u.busy_time_s /= n_runs;
                u.utilization /= n_runs;
                u.mean_wait_s /= n_runs;
            }
            return row;
        }));
    }

    Sweep out;
    out.parameter = parameter;
    for (auto& f : futures) out.rows.push_back(f.get());

    std::ostringstream csv;
    csv << "parameter,value";
    for (std::size_t k = 0; k < kDelayKindCount; ++k)
        csv << ',' << delay_kind_name(static_cast<DelayKind>(k)) << "_mean";
    for (const auto& spec : cfg.resources)
        csv << ",util_" << spec.name << ",wait_" << spec.name;
    csv << '\n';
    for (const auto& row : out.rows) {
        csv << parameter << ',' << format_ratio(row.value);
        for (std::size_t k = 0; k < kDelayKindCount; ++k)
            csv << ',' << format_seconds(row.mean_delay_s[k]);
        for (const auto& u : row.utilization)
            csv << ',' << format_ratio(u.utilization) << ',' << format_seconds(u.mean_wait_s);
        csv << '\n';
    }
    out.csv = csv.str();
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw SimError(ErrorCode::ParseError, "cannot write " + tmp);
        os << content;
        os.flush();
        if (!os) throw SimError(ErrorCode::ParseError, "short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw SimError(ErrorCode::ParseError, "cannot rename " + tmp + " to " + path);
}

} // namespace ccsim
