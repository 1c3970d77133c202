// Command-line driver: simulate -> estimate -> compare -> fit.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "semcmg/commands.hpp"

namespace {

using namespace semcmg;

void add_estimate_flags(CLI::App* cmd, cli::EstimateOptions& opts, std::string& digamma) {
    cmd->add_option("--input", opts.input_path, "Packet log CSV (seq,distance_m,rssi_dbm)")->required();
    cmd->add_option("--out", opts.out_path, "Output CSV")->required();
    cmd->add_option("--c-db", opts.c_db, "Censoring threshold in dBm")->capture_default_str();
    cmd->add_option("--ld-step", opts.ld_step, "Log-distance bin width")->capture_default_str();
    cmd->add_option("--iters", opts.sem.iterations, "SEM iterations")->capture_default_str();
    cmd->add_option("--burn", opts.sem.burn_window, "Final iterations averaged into the estimate")
        ->capture_default_str();
    cmd->add_option("--alpha-floor", opts.sem.alpha_floor, "Lower clamp for the mixing weights")
        ->capture_default_str();
    cmd->add_option("--seed", opts.sem.seed, "Master seed")->capture_default_str();
    cmd->add_option("--init-m1", opts.init.m1_guess, "Initial signal shape (side information)");
    cmd->add_option("--init-truth", opts.init.truth_path, "Initialize from a truth CSV written by simulate");
    cmd->add_option("--perturb", opts.init.perturb, "Relative perturbation applied to --init-truth values")
        ->capture_default_str();
    cmd->add_option("--digamma", digamma, "Digamma used in the shape update")
        ->check(CLI::IsMember({"exact", "three-term"}))
        ->capture_default_str();
    cmd->add_option("--workers", opts.workers, "Worker threads (0 = all cores)")->capture_default_str();
}

void apply_digamma(cli::EstimateOptions& opts, const std::string& digamma) {
    opts.sem.digamma_mode = digamma == "three-term" ? DigammaMode::three_term : DigammaMode::exact;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Censored two-component Gamma mixture estimation from RSSI and packet-loss counts"};
    app.require_subcommand(1);

    cli::SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic packet log and its ground truth");
    simulate->add_option("--config", sim.config_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", sim.seed, "Override the scenario seed");
    simulate->add_option("--out", sim.out_path, "Packet log CSV; ground truth is written next to it as <stem>.truth.csv")->required();

    cli::EstimateOptions est;
    std::string est_digamma = "exact";
    std::string trace_path;
    auto* estimate = app.add_subcommand("estimate", "Per-bin SEM estimates");
    add_estimate_flags(estimate, est, est_digamma);
    estimate->add_option("--trace", est.trace_path, "Per-iteration parameter trace CSV");

    cli::EstimateOptions cmp;
    std::string cmp_digamma = "exact";
    auto* compare = app.add_subcommand("compare", "SEM shape next to single-component baselines");
    add_estimate_flags(compare, cmp, cmp_digamma);

    cli::FitOptions fit;
    std::string exclude;
    auto* fit_cmd = app.add_subcommand("fit", "Least-squares path-loss line through per-bin means");
    fit_cmd->add_option("--input", fit.input_path, "Estimates CSV")->required();
    fit_cmd->add_option("--component", fit.component, "1 = signal, 2 = interference")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    fit_cmd->add_option("--exclude-ld", exclude, "Skip bins with LO <= ld <= HI");
    fit_cmd->add_option("--out", fit.out_path, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::kUsage;
    }

    if (*simulate) return cli::cmd_simulate(sim, std::cerr);
    if (*estimate) {
        apply_digamma(est, est_digamma);
        return cli::cmd_estimate(est, std::cerr);
    }
    if (*compare) {
        apply_digamma(cmp, cmp_digamma);
        return cli::cmd_compare(cmp, std::cerr);
    }
    if (!exclude.empty()) {
        fit.exclude_ld = cli::parse_ld_range(exclude);
        if (!fit.exclude_ld) {
            std::cerr << "error: --exclude-ld expects LO:HI\n";
            return cli::kUsage;
        }
    }
    return cli::cmd_fit(fit, std::cout, std::cerr);
}
