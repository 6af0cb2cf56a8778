// Apache License, Version 2.0, refer to LICENSE.txt

#include <CLI11.hpp>

#include <iostream>

#include "nggp/cli.hh"

int main(int argc, char** argv) {
  CLI::App app{"NGGP mixture models: MCMC, verification and prior simulation"};
  app.require_subcommand(1);

  nggp::RunConfig run;
  std::string model = "nonconjugate", sampler = "slice";
  double tau_fixed = 1.0, grid_min = 0.0, grid_max = 0.0;
  bool infer_tau = false, fix_a = false, fix_sigma = false;
  auto* run_cmd = app.add_subcommand("run", "run one chain and write its outputs");
  run_cmd->add_option("--data", run.data_path, "CSV file, one observation per row")->required();
  run_cmd->add_option("--model", model, "conjugate-1d | nonconjugate")->capture_default_str();
  run_cmd->add_option("--sampler", sampler, "marg-conj | neal8 | reuse | slice")->capture_default_str();
  run_cmd->add_option("--C", run.C, "temporaries (neal8) or pool size (reuse)")->capture_default_str();
  run_cmd->add_option("--iters", run.iters, "iterations after burn-in")->capture_default_str();
  run_cmd->add_option("--burnin", run.burnin)->capture_default_str();
  run_cmd->add_option("--thin", run.thin)->capture_default_str();
  run_cmd->add_option("--seed", run.seed)->capture_default_str();
  run_cmd->add_option("--out", run.out_dir, "output directory")->capture_default_str();
  run_cmd->add_option("--tau-fixed", tau_fixed, "value of tau (initial value with --infer-tau)")
      ->capture_default_str();
  run_cmd->add_flag("--infer-tau", infer_tau, "place a Gamma prior on tau and update it");
  run_cmd->add_option("--a-shape", run.prior.a_shape)->capture_default_str();
  run_cmd->add_option("--a-rate", run.prior.a_rate)->capture_default_str();
  run_cmd->add_option("--sigma-alpha", run.prior.sigma_alpha)->capture_default_str();
  run_cmd->add_option("--sigma-beta", run.prior.sigma_beta)->capture_default_str();
  run_cmd->add_option("--tau-shape", run.prior.tau_shape)->capture_default_str();
  run_cmd->add_option("--tau-rate", run.prior.tau_rate)->capture_default_str();
  run_cmd->add_option("--a-init", run.a_init)->capture_default_str();
  run_cmd->add_option("--sigma-init", run.sigma_init)->capture_default_str();
  run_cmd->add_flag("--fix-a", fix_a, "keep a at --a-init");
  run_cmd->add_flag("--fix-sigma", fix_sigma, "keep sigma at --sigma-init (0 gives the DP)");
  auto* gmin = run_cmd->add_option("--grid-min", grid_min, "density grid lower end");
  auto* gmax = run_cmd->add_option("--grid-max", grid_max, "density grid upper end");
  run_cmd->add_option("--grid-points", run.grid_points, "points per dimension")->capture_default_str();

  std::string level = "default";
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle suite");
  verify_cmd->add_option("--level", level, "quick | default")->capture_default_str();
  verify_cmd->add_option("--seed", verify_seed)->capture_default_str();

  nggp::PriorSimConfig prior;
  double a = 1.0, sigma = 0.5, tau = 1.0;
  auto* prior_cmd = app.add_subcommand("prior-sim", "cluster-count histograms under the prior");
  prior_cmd->add_option("--a", a)->capture_default_str();
  prior_cmd->add_option("--sigma", sigma)->capture_default_str();
  prior_cmd->add_option("--tau", tau)->capture_default_str();
  prior_cmd->add_option("--n", prior.ns, "sample sizes")->capture_default_str();
  prior_cmd->add_option("--reps", prior.replicates)->capture_default_str();
  prior_cmd->add_option("--seed", prior.seed)->capture_default_str();
  prior_cmd->add_option("--out", prior.out_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      run.model = nggp::parse_model(model);
      run.sampler = nggp::parse_sampler(sampler);
      run.tau = tau_fixed;
      run.prior.infer_tau = infer_tau;
      run.prior.infer_a = !fix_a;
      run.prior.infer_sigma = !fix_sigma;
      if (*gmin) run.grid_min = grid_min;
      if (*gmax) run.grid_max = grid_max;
      return nggp::run_command(run);
    }
    if (*verify_cmd) {
      if (level != "quick" && level != "default") throw std::invalid_argument("unknown level " + level);
      auto lv = level == "quick" ? nggp::VerifyLevel::kQuick : nggp::VerifyLevel::kDefault;
      return nggp::verify_command(lv, verify_seed, std::cout);
    }
    prior.params = nggp::NggpParams(a, sigma, tau);
    return nggp::prior_sim_command(prior);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
