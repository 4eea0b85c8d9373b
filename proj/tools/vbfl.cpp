// vbfl: run VBFL / Vanilla FL experiments and compare their outputs.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vbfl/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Blockchained federated learning simulator with validator voting and proof-of-stake"};
    app.require_subcommand(1);

    vbfl::cli::RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run one experiment and write its metric files");
    run_cmd->add_option("--preset", run.preset, "named setup (see `vbfl presets`)");
    run_cmd->add_option("--config", run.config_file, "key = value experiment file");
    run_cmd->add_option("--rounds", run.rounds, "communication rounds");
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--vh", run.vh, "validator threshold");
    run_cmd->add_option("--vh-file", run.vh_file, "file holding a threshold (e.g. suggested_vh.txt)");
    run_cmd->add_option("--consensus", run.consensus, "pos or pow")->check(CLI::IsMember({"pos", "pow"}));
    run_cmd->add_option("--pow-difficulty", run.pow_difficulty, "leading zero hex digits for PoW");
    run_cmd->add_option("--malicious", run.malicious, "number of malicious devices (highest indices)");
    run_cmd->add_option("--out", run.out_dir, "output directory (default $VBFL_OUT_DIR/<name>-s<seed>)");
    run_cmd->add_option("--set", run.settings, "extra config override key=value (repeatable)");
    run_cmd->add_flag("--quiet", run.quiet, "suppress per-round lines");

    std::vector<std::string> dirs;
    auto* cmp_cmd = app.add_subcommand("compare", "summarize completed runs");
    cmp_cmd->add_option("dirs", dirs, "run output directories")->required();

    auto* presets_cmd = app.add_subcommand("presets", "list named setups");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : vbfl::cli::kConfigError;
    }

    if (run_cmd->parsed()) return vbfl::cli::run(run, std::cout, std::cerr);
    if (cmp_cmd->parsed()) return vbfl::cli::compare(dirs, std::cout, std::cerr);
    if (presets_cmd->parsed()) vbfl::cli::list_presets(std::cout);
    return vbfl::cli::kOk;
}
