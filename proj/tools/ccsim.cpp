// Command-line front end: validate configs, run scenarios, compare delivery
// strategies, and run sensitivity sweeps. All experiment structure lives in
// the config file; a run is fully specified by (config, seed).

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccsim/config.hpp"
#include "ccsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw std::invalid_argument("trailing text in '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw std::invalid_argument("empty value list");
    return values;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator of version-controlled cancer case collaboration"};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool trace = false;
    int n_runs = 0;
    std::string param;
    std::string values_text;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config file")->required();
        cmd->add_option("--seed", seed, "override the config's seed");
    };

    CLI::App* validate = app.add_subcommand("validate", "parse, normalize, and print a config");
    add_common(validate);

    CLI::App* run = app.add_subcommand("run", "run one scenario and export its report");
    add_common(run);
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--trace", trace, "also export the event trace");

    CLI::App* compare = app.add_subcommand("compare", "paired-seed strategy comparison");
    add_common(compare);
    compare->add_option("--out", out_dir, "output directory");
    compare->add_option("--runs", n_runs, "number of paired runs")->default_val(30);

    CLI::App* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
    add_common(sweep);
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--runs", n_runs, "runs per value")->default_val(5);
    sweep->add_option("--param", param, "parameter to vary")->required();
    sweep->add_option("--values", values_text, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        ccsim::ScenarioConfig cfg = ccsim::load_config(config_path);
        CLI::App* active = app.get_subcommands().front();
        if (active->count("--seed") > 0) cfg.seed = seed;

        if (*validate) {
            std::cout << cfg.canonical_text();
            std::cout << "digest: " << cfg.digest() << '\n';
            return kExitOk;
        }

        std::filesystem::create_directories(out_dir);

        if (*run) {
            ccsim::RunResult result = ccsim::run_scenario(cfg, trace);
            ccsim::write_file_atomic(join_path(out_dir, "report.txt"), result.report_text);
            ccsim::write_file_atomic(join_path(out_dir, "samples.csv"), result.samples_csv);
            if (trace) ccsim::write_file_atomic(join_path(out_dir, "trace.tsv"), result.trace_tsv);
            std::cout << "digest " << result.digest << ": " << result.arrivals << " arrivals, "
                      << result.closed << " closed, " << result.samples.size()
                      << " samples -> " << out_dir << '\n';
            return kExitOk;
        }

        if (*compare) {
            ccsim::Comparison cmp = ccsim::compare_strategies(cfg, n_runs);
            ccsim::write_file_atomic(join_path(out_dir, "comparison.csv"), cmp.csv);
            std::cout << "digest " << cfg.digest() << ": " << n_runs
                      << " paired runs -> " << out_dir << '\n';
            return kExitOk;
        }

        std::vector<double> values;
        try {
            values = parse_value_list(values_text);
        } catch (const std::exception& e) {
            std::cerr << "bad --values: " << e.what() << '\n';
            return kExitUsage;
        }
        ccsim::Sweep table = ccsim::sensitivity_sweep(cfg, param, values, n_runs);
        ccsim::write_file_atomic(join_path(out_dir, "sweep.csv"), table.csv);
        std::cout << "digest " << cfg.digest() << ": swept " << param << " over "
                  << values.size() << " values -> " << out_dir << '\n';
        return kExitOk;
    } catch (const ccsim::SimError& e) {
        std::cerr << e.what() << '\n';
        switch (e.code()) {
        case ccsim::ErrorCode::ParseError:
        case ccsim::ErrorCode::ValidationError:
        case ccsim::ErrorCode::MissingUnit:
        case ccsim::ErrorCode::UnknownParameter:
            return kExitConfig;
        default:
            return kExitRuntime;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kExitRuntime;
    }
}
