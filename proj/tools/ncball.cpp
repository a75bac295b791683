// Command-line front end: config-driven experiments over the truncated Fock
// machinery. Exit codes: 0 success, 1 config error, 2 numerical
// non-convergence, 3 property violation.

#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "ncball/commands.hpp"

namespace {

bool log_enabled() {
    const char* v = std::getenv("NCBALL_LOG");
    return v != nullptr && *v != '\0' && std::string(v) != "0";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated Fock-space norms, ideal deformations and matrix checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int grid_parallel = 1;
    std::uint64_t seed_override = 0;
    bool seed_given = false;

    using Handler = std::function<int(const ncball::ExperimentConfig&, const ncball::RunOptions&)>;
    const std::map<std::string, Handler> handlers{
        {"ideal-info", ncball::cmd_ideal_info}, {"norm", ncball::cmd_norm},
        {"norm-field", ncball::cmd_norm_field}, {"grassmann-path", ncball::cmd_grassmann_path},
        {"tower-check", ncball::cmd_tower_check}, {"eval", ncball::cmd_eval},
        {"vn-test", ncball::cmd_vn_test},       {"variety-test", ncball::cmd_variety_test},
        {"suite", ncball::cmd_suite}};

    for (const auto& [name, handler] : handlers) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_path, "output path (default: stdout / config 'out')");
        sub->add_option("--grid-parallel", grid_parallel, "worker threads for grid scans")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
            seed_given = true;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    ncball::RunOptions opt;
    if (!out_path.empty()) opt.out = out_path;
    opt.grid_parallel = grid_parallel;
    if (seed_given) opt.seed = seed_override;
    opt.log = log_enabled();

    try {
        ncball::ExperimentConfig cfg = ncball::load_config(config_path);
        return handlers.at(sub->get_name())(cfg, opt);
    } catch (const ncball::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ncball::NonConvergence& e) {
        std::cerr << "numerical non-convergence: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
