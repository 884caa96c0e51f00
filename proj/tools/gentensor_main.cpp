// Command-line front end: run experiment configs, list and inspect the
// canonical experiment registry.

#include <CLI11.hpp>
#include <iostream>

#include "gentensor/experiment.hpp"

using gentensor::Json;
using gentensor::RunOptions;

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for generalized tensor fields"};
    app.require_subcommand(1);

    RunOptions opts;
    std::string config_path;
    std::string name;

    auto* run = app.add_subcommand("run", "run an experiment from a config file "
                                          "or the registry");
    run->add_option("--config", config_path, "path to a JSON experiment config");
    run->add_option("--name", name, "registry experiment name (alternative to --config)");
    run->add_option("--out", opts.out_dir, "output directory for report.json and rates.csv");
    run->add_option("--threads", opts.threads, "worker cap for the sweep engine");
    long long seed = -1;
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--eps-min", opts.eps_min, "override the smallest eps");
    run->add_option("--eps-max", opts.eps_max, "override the largest eps");
    run->add_flag("--verbose", opts.verbose, "print per-test lines");

    auto* registry = app.add_subcommand("registry", "list canonical experiments");
    auto* describe = app.add_subcommand("describe", "print a canonical experiment config");
    std::string describe_name;
    describe->add_option("name", describe_name, "experiment name")->required();

    CLI11_PARSE(app, argc, argv);
    opts.seed = seed;

    try {
        if (registry->parsed()) {
            for (const auto& n : gentensor::registry_names()) std::cout << n << "\n";
            return 0;
        }
        if (describe->parsed()) {
            std::cout << gentensor::registry_config(describe_name).dump(2) << "\n";
            return 0;
        }
        // run
        gentensor::RunResult res;
        if (!config_path.empty()) {
            res = gentensor::run_experiment_file(config_path, opts);
        } else if (!name.empty()) {
            res = gentensor::run_experiment(gentensor::registry_config(name), opts);
        } else {
            std::cerr << "run: need --config PATH or --name NAME\n";
            return 1;
        }
        if (res.exit_code == 1) {
            std::cerr << "error: " << res.report.value("error", "unknown") << "\n";
            return 1;
        }
        if (opts.verbose) {
            std::cout << res.report.dump(2) << "\n";
        } else {
            std::cout << res.report.value("name", "experiment") << ": " << res.verdict
                      << "\n";
        }
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
