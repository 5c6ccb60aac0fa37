#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hwm/io.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "run";
    long seed = -1;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)")
        ->required();
    cmd->add_option("--out", args.out_dir, "run directory for outputs");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral laboratory for sphere-valued dispersive flows"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string run_dir;

    CLI::App* evolve = app.add_subcommand("evolve", "integrate the first-order flow");
    CLI::App* analyze = app.add_subcommand("analyze", "norms and residuals of a stored run");
    CLI::App* iterate = app.add_subcommand("iterate", "outer/inner fixed-point scheme");
    CLI::App* probe = app.add_subcommand("probe", "inequality and multiplier ensembles");
    CLI::App* identities = app.add_subcommand("identities", "pointwise and band identities");
    for (CLI::App* cmd : {evolve, analyze, iterate, probe, identities})
        add_common(cmd, args);
    analyze->add_option("--run", run_dir, "directory holding evolve output")->required();

    CLI11_PARSE(app, argc, argv);

    using namespace hwm::io;
    try {
        const Config cfg = Config::load(args.config_path);
        RunOptions opt;
        opt.out_dir = args.out_dir;
        opt.seed_override = args.seed;
        opt.quiet = args.quiet;

        int rc = kExitOk;
        if (evolve->parsed()) rc = run_evolve(cfg, opt);
        else if (analyze->parsed()) rc = run_analyze(cfg, opt, run_dir);
        else if (iterate->parsed()) rc = run_iterate(cfg, opt);
        else if (probe->parsed()) rc = run_probe(cfg, opt);
        else rc = run_identities(cfg, opt);

        if (!args.quiet) {
            if (rc == kExitDiverged) std::cerr << "run diverged\n";
            if (rc == kExitNonContraction) std::cerr << "iteration stopped contracting\n";
        }
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
