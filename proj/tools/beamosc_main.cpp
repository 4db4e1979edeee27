#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamosc/config.hpp"
#include "beamosc/scenarios.hpp"

namespace {

struct SubcommandSpec {
    const char* name;
    const char* description;
    beamosc::ScenarioKind kind;
};

constexpr SubcommandSpec kSubcommands[] = {
    {"classical", "Integrate classical trajectories, one CSV per beam speed",
     beamosc::ScenarioKind::classical},
    {"partial", "Evolve the driven quantum oscillator and record observables",
     beamosc::ScenarioKind::partial},
    {"full", "Build the entangled two-branch final state and its densities",
     beamosc::ScenarioKind::full},
    {"measure", "Partial-projection measurements: conditional curves and sampled outcomes",
     beamosc::ScenarioKind::measure},
    {"sweep", "Summary table over beam speeds and coupling strengths",
     beamosc::ScenarioKind::sweep},
    {"compare", "Cross-treatment agreement report with tolerances",
     beamosc::ScenarioKind::compare},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"beamosc: one-dimensional inelastic scattering of a beam particle "
                 "off a harmonic oscillator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed_override = 0;
    int verbosity = 0;

    for (const auto& spec : kSubcommands) {
        CLI::App* cmd = app.add_subcommand(spec.name, spec.description);
        cmd->add_option("-c,--config", config_path, "Path to the key = value config file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("-o,--output", output_dir, "Output directory (default: out)");
        cmd->add_option("--seed", seed_override, "Override numerics.seed from the config");
        cmd->add_flag("-V,--verbose", verbosity, "Print per-quantity details");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1; // usage problems are config errors
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        beamosc::ScenarioConfig cfg = beamosc::load_config_file(config_path);
        for (const auto& spec : kSubcommands) {
            if (active->get_name() == spec.name) cfg.scenario = spec.kind;
        }
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (cfg.output_dir.empty()) cfg.output_dir = "out";
        if (active->count("--seed") > 0) cfg.numerics.seed = seed_override;
        beamosc::validate_config(cfg);
        return beamosc::run_scenario(cfg, std::cout, verbosity);
    } catch (const beamosc::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
}
