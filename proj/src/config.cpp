#include "ccsim/config.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ccsim/error.hpp"

namespace ccsim {

namespace {

// --- key-tree parsing ----------------------------------------------------------

struct Node {
    std::string value; // empty for section nodes
    std::vector<std::pair<std::string, Node>> children;
    int line = 0;

    const Node* find(const std::string& key) const {
        for (const auto& [k, child] : children) {
            if (k == key) return &child;
        }
        return nullptr;
    }
};

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw SimError(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

Node parse_tree(const std::string& text) {
    Node root;
    std::vector<Node*> stack{&root}; // stack[d] = open node at depth d
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::size_t hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        if (trim(line).empty()) continue;
        if (line.find('\t') != std::string::npos) {
            parse_fail(line_no, "tabs are not allowed, indent with two spaces");
        }
        std::size_t indent = 0;
        while (indent < line.size() && line[indent] == ' ') ++indent;
        if (indent % 2 != 0) parse_fail(line_no, "odd indentation");
        std::size_t depth = indent / 2;
        if (depth + 1 > stack.size()) parse_fail(line_no, "over-indented line");

        std::size_t colon = line.find(':');
        if (colon == std::string::npos) parse_fail(line_no, "expected `key: value`");
        std::string key = trim(line.substr(0, colon));
        std::string value = trim(line.substr(colon + 1));
        if (key.empty()) parse_fail(line_no, "empty key");

        Node* parent = stack[depth];
        if (!parent->value.empty()) parse_fail(line_no, "nested under a leaf value");
        if (parent->find(key) != nullptr) parse_fail(line_no, "duplicate key `" + key + "`");

        Node node;
        node.value = value;
        node.line = line_no;
        parent->children.emplace_back(key, std::move(node));
        stack.resize(depth + 1);
        stack.push_back(&parent->children.back().second);
    }
    return root;
}

// --- leaf interpretation ---------------------------------------------------------

double parse_number(const Node& node, const std::string& key) {
    const char* begin = node.value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || trim(end).size() != 0) {
        parse_fail(node.line, "expected a plain number for `" + key + "`");
    }
    return v;
}

std::uint64_t parse_u64(const Node& node, const std::string& key) {
    const char* begin = node.value.c_str();
    char* end = nullptr;
    unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || trim(end).size() != 0) {
        parse_fail(node.line, "expected an integer for `" + key + "`");
    }
    return v;
}

double unit_multiplier(const std::string& unit) {
    if (unit == "s") return 1.0;
    if (unit == "min") return kSecondsPerMinute;
    if (unit == "h") return kSecondsPerHour;
    if (unit == "d") return kSecondsPerDay;
    return -1.0;
}

/// A duration literal: "<number> <unit>", unit mandatory.
double parse_duration_s(const Node& node, const std::string& key) {
    const char* begin = node.value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) parse_fail(node.line, "expected a duration for `" + key + "`");
    std::string unit = trim(end);
    if (unit.empty()) {
        throw SimError(ErrorCode::MissingUnit,
                       "`" + key + "` needs a unit (s, min, h, d), line " +
                           std::to_string(node.line));
    }
    double mult = unit_multiplier(unit);
    if (mult < 0.0) {
        throw SimError(ErrorCode::MissingUnit, "`" + key + "` has unknown unit `" + unit +
                                                   "`, line " + std::to_string(node.line));
    }
    return v * mult;
}

std::vector<double> parse_duration_list_s(const Node& node, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(node.value);
    while (std::getline(in, item, ',')) {
        Node leaf;
        leaf.value = trim(item);
        leaf.line = node.line;
        if (leaf.value.empty()) parse_fail(node.line, "empty entry in `" + key + "`");
        out.push_back(parse_duration_s(leaf, key));
    }
    return out;
}

[[noreturn]] void unknown_key(const Node& node, const std::string& key) {
    throw SimError(ErrorCode::ValidationError,
                   "unknown key `" + key + "`, line " + std::to_string(node.line));
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
    throw SimError(ErrorCode::ValidationError, "`" + key + "` " + why);
}

void apply_pool(const Node& section, ScenarioConfig& cfg) {
    cfg.pool_counts.clear();
    for (const auto& [key, node] : section.children) {
        auto role = role_from_name(key);
        if (!role) unknown_key(node, "pool." + key);
        cfg.pool_counts[*role] = static_cast<int>(parse_number(node, "pool." + key));
    }
}

void apply_transitions(const Node& section, ScenarioConfig& cfg) {
    cfg.table.probabilities.clear();
    for (const auto& [from_key, from_node] : section.children) {
        auto from = stage_from_name(from_key);
        if (!from) unknown_key(from_node, "transitions." + from_key);
        for (const auto& [to_key, to_node] : from_node.children) {
            auto to = stage_from_name(to_key);
            if (!to) unknown_key(to_node, "transitions." + from_key + "." + to_key);
            cfg.table.probabilities[{*from, *to}] =
                parse_number(to_node, "transitions." + from_key + "." + to_key);
        }
    }
}

void apply_dwell(const Node& section, ScenarioConfig& cfg) {
    cfg.table.dwell_mean_s.clear();
    for (const auto& [key, node] : section.children) {
        auto stage = stage_from_name(key);
        if (!stage) unknown_key(node, "dwell." + key);
        cfg.table.dwell_mean_s[*stage] = parse_duration_s(node, "dwell." + key);
    }
}

void apply_resources(const Node& section, ScenarioConfig& cfg) {
    cfg.resources.clear();
    for (const auto& [name, node] : section.children) {
        ScenarioConfig::ResourceSpec spec;
        spec.name = name;
        for (const auto& [key, field] : node.children) {
            if (key == "kind") {
                auto kind = resource_kind_from_name(field.value);
                if (!kind) invalid("resources." + name + ".kind", "must be Personnel, Facility, or Equipment");
                spec.kind = *kind;
            } else if (key == "capacity") {
                spec.capacity = static_cast<int>(parse_number(field, "resources." + name + ".capacity"));
            } else {
                unknown_key(field, "resources." + name + "." + key);
            }
        }
        cfg.resources.push_back(std::move(spec));
    }
}

void apply_stage_resources(const Node& section, ScenarioConfig& cfg) {
    cfg.stage_resources.clear();
    for (const auto& [key, node] : section.children) {
        auto stage = stage_from_name(key);
        if (!stage) unknown_key(node, "stage_resources." + key);
        cfg.stage_resources[*stage] = node.value;
    }
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    Node root = parse_tree(text);
    ScenarioConfig cfg;
    for (const auto& [key, node] : root.children) {
        if (key == "seed") {
            cfg.seed = parse_u64(node, key);
        } else if (key == "horizon") {
            cfg.horizon_s = parse_duration_s(node, key);
        } else if (key == "arrival_rate_per_day") {
            cfg.arrival_rate_per_day = parse_number(node, key);
        } else if (key == "arrivals") {
            cfg.explicit_arrivals_s = parse_duration_list_s(node, key);
        } else if (key == "feedback_latency") {
            cfg.feedback_latency_s = parse_duration_s(node, key);
        } else if (key == "validation_latency") {
            cfg.validation_latency_s = parse_duration_s(node, key);
        } else if (key == "p_flag") {
            cfg.p_flag = parse_number(node, key);
        } else if (key == "response_delay") {
            cfg.response_delay_s = parse_duration_s(node, key);
        } else if (key == "contributions_per_stage") {
            cfg.contributions_per_stage = static_cast<int>(parse_number(node, key));
        } else if (key == "strategy") {
            if (node.value == "vcs") {
                cfg.strategy = DeliveryPolicy::Strategy::VcsModel;
            } else if (node.value == "baseline") {
                cfg.strategy = DeliveryPolicy::Strategy::Baseline;
            } else {
                invalid("strategy", "must be `vcs` or `baseline`");
            }
        } else if (key == "baseline_sync_interval") {
            cfg.baseline_sync_interval_s = parse_duration_s(node, key);
        } else if (key == "core_fraction") {
            cfg.core_fraction = parse_number(node, key);
        } else if (key == "dwell_distribution") {
            if (node.value == "exponential") {
                cfg.table.fixed_dwell = false;
            } else if (node.value == "fixed") {
                cfg.table.fixed_dwell = true;
            } else {
                invalid("dwell_distribution", "must be `exponential` or `fixed`");
            }
        } else if (key == "bottleneck_threshold") {
            cfg.bottleneck_threshold = parse_number(node, key);
        } else if (key == "bottleneck_wait_ceiling") {
            cfg.bottleneck_wait_ceiling_s = parse_duration_s(node, key);
        } else if (key == "pool") {
            apply_pool(node, cfg);
        } else if (key == "transitions") {
            apply_transitions(node, cfg);
        } else if (key == "dwell") {
            apply_dwell(node, cfg);
        } else if (key == "resources") {
            apply_resources(node, cfg);
        } else if (key == "stage_resources") {
            apply_stage_resources(node, cfg);
        } else {
            unknown_key(node, key);
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SimError(ErrorCode::ParseError, "cannot read config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void ScenarioConfig::validate() const {
    if (horizon_s <= 0.0) invalid("horizon", "must be positive");
    if (arrival_rate_per_day < 0.0) invalid("arrival_rate_per_day", "must be nonnegative");
    if (feedback_latency_s < 0.0) invalid("feedback_latency", "must be nonnegative");
    if (validation_latency_s < 0.0) invalid("validation_latency", "must be nonnegative");
    if (response_delay_s < 0.0) invalid("response_delay", "must be nonnegative");
    if (p_flag < 0.0 || p_flag > 1.0) invalid("p_flag", "must lie in [0, 1]");
    if (baseline_sync_interval_s <= 0.0) invalid("baseline_sync_interval", "must be positive");
    if (core_fraction <= 0.0 || core_fraction > 1.0) invalid("core_fraction", "must lie in (0, 1]");
    if (contributions_per_stage < 0) invalid("contributions_per_stage", "must be nonnegative");
    if (bottleneck_threshold <= 0.0 || bottleneck_threshold > 1.0) {
        invalid("bottleneck_threshold", "must lie in (0, 1]");
    }
    for (double t : explicit_arrivals_s) {
        if (t < 0.0) invalid("arrivals", "instants must be nonnegative");
    }
    for (const auto& [role, count] : pool_counts) {
        if (count < 0) invalid(std::string("pool.") + role_name(role), "must be nonnegative");
    }
    for (const ResourceSpec& spec : resources) {
        if (spec.capacity < 1) invalid("resources." + spec.name + ".capacity", "must be >= 1");
    }
    for (const auto& [stage, name] : stage_resources) {
        bool known = false;
        for (const ResourceSpec& spec : resources) {
            if (spec.name == name) known = true;
        }
        if (!known) {
            invalid(std::string("stage_resources.") + stage_name(stage),
                    "references unknown resource `" + name + "`");
        }
    }
    try {
        table.validate();
    } catch (const SimError& e) {
        throw SimError(ErrorCode::ValidationError, std::string("transitions: ") + e.what());
    }
}

std::string ScenarioConfig::canonical_text() const {
    std::ostringstream out;
    auto num = [](double v) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return std::string(buf);
    };
    out << "seed: " << seed << '\n';
    out << "horizon: " << format_seconds(horizon_s) << " s\n";
    out << "strategy: "
        << (strategy == DeliveryPolicy::Strategy::VcsModel ? "vcs" : "baseline") << '\n';
    out << "arrival_rate_per_day: " << num(arrival_rate_per_day) << '\n';
    if (!explicit_arrivals_s.empty()) {
        out << "arrivals:";
        for (std::size_t i = 0; i < explicit_arrivals_s.size(); ++i) {
            out << (i == 0 ? " " : ", ") << format_seconds(explicit_arrivals_s[i]) << " s";
        }
        out << '\n';
    }
    out << "feedback_latency: " << format_seconds(feedback_latency_s) << " s\n";
    out << "validation_latency: " << format_seconds(validation_latency_s) << " s\n";
    out << "p_flag: " << num(p_flag) << '\n';
    out << "response_delay: " << format_seconds(response_delay_s) << " s\n";
    out << "baseline_sync_interval: " << format_seconds(baseline_sync_interval_s) << " s\n";
    out << "core_fraction: " << num(core_fraction) << '\n';
    out << "contributions_per_stage: " << contributions_per_stage << '\n';
    out << "dwell_distribution: " << (table.fixed_dwell ? "fixed" : "exponential") << '\n';
    out << "bottleneck_threshold: " << num(bottleneck_threshold) << '\n';
    out << "bottleneck_wait_ceiling: " << format_seconds(bottleneck_wait_ceiling_s) << " s\n";
    out << "pool:\n";
    for (const auto& [role, count] : pool_counts) {
        out << "  " << role_name(role) << ": " << count << '\n';
    }
    out << "transitions:\n";
    CaseStage last_from = CaseStage::Closed;
    bool first = true;
    for (const auto& [edge, p] : table.probabilities) {
        if (first || edge.first != last_from) {
            out << "  " << stage_name(edge.first) << ":\n";
            last_from = edge.first;
            first = false;
        }
        out << "    " << stage_name(edge.second) << ": " << num(p) << '\n';
    }
    out << "dwell:\n";
    for (const auto& [stage, mean] : table.dwell_mean_s) {
        out << "  " << stage_name(stage) << ": " << format_seconds(mean) << " s\n";
    }
    out << "resources:\n";
    for (const ResourceSpec& spec : resources) {
        out << "  " << spec.name << ":\n";
        out << "    kind: " << resource_kind_name(spec.kind) << '\n';
        out << "    capacity: " << spec.capacity << '\n';
    }
    if (!stage_resources.empty()) {
        out << "stage_resources:\n";
        for (const auto& [stage, name] : stage_resources) {
            out << "  " << stage_name(stage) << ": " << name << '\n';
        }
    }
    return out.str();
}

std::string ScenarioConfig::digest() const {
    std::string text = canonical_text();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace ccsim
