// thermalsim.cpp
// Command line entry point: loads an experiment config, applies overrides,
// dispatches to the engines and writes CSV/JSON artifacts plus a manifest.
// Exit codes: 0 success, 1 runtime failure, 2 config validation failure.
// Errors go to stderr as single-line JSON.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "thermalsim/experiments.hpp"

namespace {

using thermalsim::ValidationError;
using thermalsim::experiments::ExperimentConfig;
using thermalsim::io::json;

void print_error(const std::string& message) {
    std::cerr << json{{"error", message}}.dump() << "\n";
}

int run_command(const std::string& config_path, const std::vector<std::string>& overrides,
                std::optional<long long> seed_flag, std::optional<std::string> out_flag,
                unsigned threads, bool debug_dump) {
    std::ifstream in(config_path);
    if (!in) {
        print_error("cannot open config file: " + config_path);
        return 2;
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        print_error("config parse error: " + std::string(e.what()));
        return 2;
    }

    // THERMALSIM_SEED is the fallback when neither config nor flags set one.
    bool seed_overridden = false;
    for (const auto& kv : overrides)
        if (kv.rfind("seed=", 0) == 0) seed_overridden = true;
    if (!doc.contains("seed") && !seed_flag && !seed_overridden) {
        if (const char* env = std::getenv("THERMALSIM_SEED")) {
            try {
                doc["seed"] = std::stoll(env);
            } catch (const std::exception&) {
                print_error("THERMALSIM_SEED: not an integer");
                return 2;
            }
        }
    }

    ExperimentConfig config = thermalsim::experiments::resolve_config(doc, overrides);
    if (seed_flag) config.seed = static_cast<std::uint64_t>(*seed_flag);
    if (out_flag) config.output_dir = *out_flag;
    config.threads = threads;
    config.debug_dump = debug_dump;

    const auto manifest = thermalsim::experiments::run_experiment(config);
    std::cout << "experiment " << config.experiment << ": " << manifest.artifact_paths.size()
              << " artifact(s) in " << config.output_dir << " ("
              << thermalsim::io::format_value(manifest.wall_time) << " s)\n";
    for (const auto& path : manifest.artifact_paths) std::cout << "  " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermalsim: q-expectation dynamics, resonance spectroscopy, pointer "
                 "statistics and detector models"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    std::string config_path;
    std::vector<std::string> overrides;
    long long seed_value = 0;
    std::string out_dir;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool debug_dump = false;
    run->add_option("config,--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--overrides", overrides, "key=value settings applied after load");
    auto* seed_opt = run->add_option("--seed", seed_value, "seed overriding the config");
    auto* out_opt = run->add_option("--out", out_dir, "output directory overriding the config");
    run->add_option("--threads", threads, "worker threads for Monte Carlo engines");
    run->add_flag("--debug-dump", debug_dump, "dump per-run trajectories where supported");

    auto* list = app.add_subcommand("list", "list the available experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(e.what());
        return 2;
    }

    try {
        if (list->parsed()) {
            std::cout << thermalsim::experiments::list_experiments();
            return 0;
        }
        return run_command(config_path, overrides,
                           seed_opt->count() ? std::optional<long long>(seed_value) : std::nullopt,
                           out_opt->count() ? std::optional<std::string>(out_dir) : std::nullopt,
                           threads, debug_dump);
    } catch (const ValidationError& e) {
        print_error(e.what());
        return 2;
    } catch (const std::exception& e) {
        print_error(e.what());
        return 1;
    }
}
