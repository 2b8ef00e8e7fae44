// dicke_cli.cpp - command-line front end for the analysis pipeline
#include <CLI11.hpp>

#include <cstdint>
#include <utility>
#include <iostream>
#include <string>

#include "dicke/config.hpp"
#include "dicke/pipeline.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_dependency = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed-phase analysis of one- and two-photon spin-boson models"};
    app.set_version_flag("--version", std::string(dicke::tool_version));
    app.require_subcommand(1);

    std::string config_path, preset, out_dir, stage_name;
    int workers = 0;
    std::uint64_t seed = 0;
    bool resume = false;
    app.add_option("--config", config_path, "run configuration file (json)");
    app.add_option("--preset", preset, "built-in configuration: one-photon-paper, two-photon-paper");
    app.add_option("--workers", workers, "worker threads (overrides the configuration)");
    app.add_option("--seed", seed, "random seed (overrides the configuration)");
    app.add_option("--out", out_dir, "output directory (overrides the configuration)");
    app.add_flag("--resume", resume, "skip stages whose artifacts are already current");

    const std::pair<const char*, const char*> stages[] = {
        {"spectrum", "solve and cache windowed eigenpairs for every configured spin"},
        {"classical", "classify the phase-space shells and export the maps"},
        {"stats", "level-ratio statistics per window, with surrogate comparison"},
        {"husimi", "coherent-field measures of the window eigenstates"},
        {"mixed", "mixed-fraction scaling fits across the spin ensembles"},
        {"all", "run every stage in dependency order"},
    };
    for (const auto& [name, blurb] : stages) {
        CLI::App* sub = app.add_subcommand(name, blurb);
        sub->fallthrough();  // accept the global options after the stage name too
        sub->parse_complete_callback([&stage_name, name = name] { stage_name = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (config_path.empty() == preset.empty())
            throw dicke::ConfigError("cli: pass exactly one of --config or --preset");
        dicke::RunConfig cfg = config_path.empty() ? dicke::preset_config(preset)
                                                   : dicke::load_config(config_path);
        if (workers > 0) cfg.workers = workers;
        if (seed > 0) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        dicke::run_pipeline(cfg, dicke::parse_stage(stage_name), resume);
    } catch (const dicke::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const dicke::DependencyError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_dependency;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_ok;
}
