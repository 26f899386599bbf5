// Batch front end for the greedy-approximation engine: run/witness/check/
// modulus/sweep subcommands over reproducible plain-text configs, emitting
// machine-readable CSV traces and JSON summaries.

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gawcga/cli.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_steps;
    std::optional<double> stop_tol;
};

gawcga::RunConfig load(const CommonArgs& args, bool config_required) {
    gawcga::RunConfig cfg;
    if (!args.config_path.empty())
        cfg = gawcga::parse_config(gawcga::read_file(args.config_path));
    else if (config_required)
        throw gawcga::ConfigError("missing --config PATH");
    if (args.seed) cfg.seed = *args.seed;
    if (args.max_steps) cfg.max_steps = *args.max_steps;
    if (args.stop_tol) cfg.stop_tol = *args.stop_tol;
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
    auto* opt = cmd->add_option("--config", args.config_path, "config file path");
    if (config_required) opt->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--max-steps", args.max_steps, "max steps override");
    cmd->add_option("--stop-tol", args.stop_tol, "stop tolerance override");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"greedy approximation runs, divergence witnesses, and "
                 "convergence-condition diagnostics"};
    app.require_subcommand(1);

    CommonArgs run_args, witness_args, check_args, modulus_args, sweep_args;
    std::string witness_name;
    std::optional<double> witness_alpha;
    std::optional<std::size_t> witness_horizon, witness_kmax;

    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    add_common(run_cmd, run_args, true);

    auto* witness_cmd =
        app.add_subcommand("witness", "construct, run and verify a divergence witness");
    witness_cmd
        ->add_option("name", witness_name,
                     "unbounded-eta | finite-lambda1 | infinite-lambda1 | smooth-space")
        ->required();
    add_common(witness_cmd, witness_args, false);
    witness_cmd->add_option("--alpha", witness_alpha, "witness alpha");
    witness_cmd->add_option("--horizon", witness_horizon, "witness horizon");
    witness_cmd->add_option("--kmax", witness_kmax, "smooth-space dictionary size");

    auto* check_cmd =
        app.add_subcommand("check", "evaluate the convergence-condition report");
    add_common(check_cmd, check_args, true);

    auto* modulus_cmd =
        app.add_subcommand("modulus", "tabulate a smoothness modulus and xi roots");
    add_common(modulus_cmd, modulus_args, false);

    auto* sweep_cmd = app.add_subcommand("sweep", "cartesian schedule sweep");
    add_common(sweep_cmd, sweep_args, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return gawcga::cmd_run(load(run_args, true), run_args.out_dir);
        if (witness_cmd->parsed()) {
            gawcga::RunConfig cfg = load(witness_args, false);
            cfg.element.kind = "witness";
            cfg.element.witness_name = witness_name;
            if (witness_alpha) cfg.witness.alpha = *witness_alpha;
            if (witness_horizon) cfg.witness.horizon = *witness_horizon;
            if (witness_kmax) cfg.witness.kmax = *witness_kmax;
            const int code = gawcga::cmd_witness(cfg, witness_args.out_dir);
            std::printf("witness %s: %s (details in %s/summary.json)\n",
                        witness_name.c_str(),
                        code == gawcga::kExitOk ? "predicate holds" : "FAILED",
                        witness_args.out_dir.c_str());
            return code;
        }
        if (check_cmd->parsed())
            return gawcga::cmd_check(load(check_args, true), check_args.out_dir);
        if (modulus_cmd->parsed())
            return gawcga::cmd_modulus(load(modulus_args, false), modulus_args.out_dir);
        if (sweep_cmd->parsed())
            return gawcga::cmd_sweep(load(sweep_args, true), sweep_args.out_dir);
    } catch (const gawcga::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return gawcga::kExitConfig;
    } catch (const gawcga::ConstraintViolation& e) {
        std::fprintf(stderr, "constraint violation: %s\n", e.what());
        return gawcga::kExitConstraint;
    } catch (const gawcga::NonConvergence& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return gawcga::kExitSolver;
    } catch (const gawcga::ConstructionInvalid& e) {
        std::fprintf(stderr, "construction invalid: %s\n", e.what());
        return gawcga::kExitConstruction;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return gawcga::kExitConfig;
    }
    return gawcga::kExitConfig;
}
