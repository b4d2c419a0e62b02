// vexp: command line front end.
//
//   vexp norms|audit|lambda-star|solve --config <path> [--seed N] [--out DIR]
//
// Prints the JSON summary on stdout and writes it (plus solution.csv for
// solve) into the output directory.

#include "vexp/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

int main(int argc, char** argv)
{
    CLI::App app{"Variable-exponent hemivariational toolkit"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    const std::pair<const char*, const char*> commands[] = {
        {"norms", "modular and norms of the configured function"},
        {"audit", "sampled hypothesis audits of the potential"},
        {"lambda-star", "estimate of the first eigenvalue lambda_*"},
        {"solve", "mountain-pass solve with certification"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON scenario file")->required();
        sub->add_option("--seed", seed, "override solver.seed");
        sub->add_option("--out", out_dir, "override output.dir");
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const vexp::Command command = vexp::parse_command(app.get_subcommands().front()->get_name());
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::cerr << "vexp: cannot read '" << config_path << "'\n";
            return 1;
        }
        std::stringstream text;
        text << in.rdbuf();
        vexp::ScenarioConfig config = vexp::parse_config(text.str());
        if (seed) {
            config.solver.seed = *seed;
        }
        if (out_dir) {
            config.output_dir = *out_dir;
        }
        const vexp::ScenarioOutcome outcome = vexp::run_scenario(config, command);
        vexp::write_outputs(outcome, command, config.output_dir);
        std::cout << outcome.summary;
        return outcome.exit_code;
    } catch (const vexp::Error& e) {
        std::cerr << "vexp: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "vexp: " << e.what() << '\n';
        return 1;
    }
}
