// kwc: batch runs of the phase-field grain model from a JSON config.

#include <iostream>

#include "CLI11.hpp"

#include "kwc/app.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"Simulations, steady states and parameter scans for the grain-boundary model"};
    kwc::app::Invocation inv;
    cli.add_option("--config", inv.configPath, "Run configuration (JSON)")->required();
    cli.add_option("--set", inv.overrides, "Override a scalar, e.g. --set stepper.h=0.05 (repeatable)");
    cli.add_option("--out", inv.outDir, "Output directory (default: config 'output', else ./out)");
    cli.add_option("--jobs", inv.jobs, "Worker threads for scan modes")->check(CLI::Range(1u, 256u));
    cli.set_version_flag("--version", std::string(kwc::io::kVersion));
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : kwc::app::Invalid;
    }
    return kwc::app::run(inv);
}
