#include <iostream>

#include "CLI11.hpp"
#include "hdsvar/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Estimation and inference for sparse structural vector autoregressions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hdsvar 1.0.0");
  int rc = 0;

  hdsvar::SimulateArgs sim;
  auto* s_sim = app.add_subcommand("simulate", "Draw a random sparse SVAR and simulate a panel");
  s_sim->add_option("--preset", sim.preset, "Base preset: class1[abcd] or class2[ab]")
      ->capture_default_str();
  s_sim->add_option("--p", sim.p, "Number of variables (override)");
  s_sim->add_option("--n", sim.n, "Sample size (override)");
  s_sim->add_option("--lags", sim.d, "VAR order (override)");
  s_sim->add_option("--k-a", sim.k_a, "Nonzeros per stacked slope row (override)");
  s_sim->add_option("--rho", sim.rho, "Companion spectral radius (override)");
  s_sim->add_option("--k-u", sim.k_u, "Number of structural shocks (override)");
  s_sim->add_option("--shock-of-interest", sim.shock_of_interest, "Shock column (override)");
  s_sim->add_option("--k-b", sim.k_b, "Nonzeros per column of B (override)");
  s_sim->add_option("--k-d", sim.k_d, "Nonzeros per row of the noise covariance (override)");
  s_sim->add_option("--law", sim.law, "Innovation law (override)")
      ->check(CLI::IsMember({"gaussian", "student_t10"}));
  s_sim->add_option("--burn-in", sim.burn_in, "Discarded pre-sample length")
      ->capture_default_str();
  s_sim->add_option("--seed", sim.seed, "Master seed")
      ->envname("HDSVAR_SEED")
      ->capture_default_str();
  s_sim->add_option("--out", sim.out, "Panel CSV path")->required();
  s_sim->add_option("--dgp-out", sim.dgp_out, "Optional generator dump path");
  s_sim->callback([&]() { rc = hdsvar::cmd_simulate(sim); });

  hdsvar::FitArgs fit;
  auto* s_fit = app.add_subcommand("fit", "Estimate the model and write fit artifacts");
  s_fit->add_option("--data", fit.data, "Panel CSV")->required();
  s_fit->add_option("--lags", fit.d, "VAR order")->capture_default_str();
  s_fit->add_option("--shocks", fit.shocks, "Shock-bearing variables (comma list, increasing)")
      ->required()
      ->delimiter(',');
  s_fit->add_flag("--center,!--no-center", fit.center, "Mean-center the panel columns")
      ->capture_default_str();
  s_fit->add_option("--lasso-grid", fit.lasso.grid_size, "Penalty grid length")
      ->capture_default_str();
  s_fit->add_option("--cv-folds", fit.covreg.folds, "Threshold cross-validation folds")
      ->capture_default_str();
  s_fit->add_option("--threshold-grid", fit.covreg.grid_size, "Threshold grid length")
      ->capture_default_str();
  s_fit->add_option("--out", fit.out_dir, "Artifact directory")->required();
  s_fit->callback([&]() { rc = hdsvar::cmd_fit(fit); });

  hdsvar::IrfArgs irf;
  auto* s_irf = app.add_subcommand("irf", "Impulse-response point estimates from a fit");
  s_irf->add_option("--data", irf.data, "Panel CSV the model was fitted on")->required();
  s_irf->add_option("--model", irf.model, "model.txt from the fit artifacts")->required();
  s_irf->add_option("--horizon", irf.horizon, "Largest response horizon")
      ->capture_default_str();
  s_irf->add_option("--vars", irf.vars, "Response variables (comma list; default all)")
      ->delimiter(',');
  s_irf->add_option("--out", irf.out, "Response CSV path")->required();
  s_irf->callback([&]() { rc = hdsvar::cmd_irf(irf); });

  hdsvar::CiArgs ci;
  auto* s_ci = app.add_subcommand("ci", "Confidence intervals for impulse responses");
  s_ci->add_option("--data", ci.data, "Panel CSV the model was fitted on")->required();
  s_ci->add_option("--model", ci.model, "model.txt from the fit artifacts")->required();
  s_ci->add_option("--horizon", ci.horizon, "Largest response horizon")->capture_default_str();
  s_ci->add_option("--vars", ci.vars, "Response variables (comma list; default all)")
      ->delimiter(',');
  s_ci->add_option("--shock-of-interest", ci.shock, "Shock column (default all)");
  s_ci->add_option("--method", ci.method, "Interval construction")
      ->check(CLI::IsMember({"boot", "gaussian"}))
      ->capture_default_str();
  s_ci->add_option("--center", ci.center, "Interval center")
      ->check(CLI::IsMember({"de", "re"}))
      ->capture_default_str();
  s_ci->add_option("--alpha", ci.alpha, "Nominal level is 1 - alpha")->capture_default_str();
  s_ci->add_option("--boot-reps", ci.boot_reps, "Bootstrap replicates")->capture_default_str();
  s_ci->add_option("--burn-in", ci.burn_in, "Bootstrap pre-sample length")
      ->capture_default_str();
  s_ci->add_flag("--freeze-tuning", ci.freeze_tuning,
                 "Reuse the fitted penalties inside bootstrap replicates");
  s_ci->add_option("--seed", ci.seed, "Bootstrap seed")
      ->envname("HDSVAR_SEED")
      ->capture_default_str();
  s_ci->add_option("--threads", ci.threads, "Bootstrap worker threads")
      ->envname("HDSVAR_THREADS")
      ->capture_default_str();
  s_ci->add_option("--out", ci.out, "Interval CSV path")->required();
  s_ci->callback([&]() { rc = hdsvar::cmd_ci(ci); });

  hdsvar::FevdTestArgs fevd;
  auto* s_fevd = app.add_subcommand(
      "fevd-test", "Test a forecast-error variance share against zero or a bound");
  s_fevd->add_option("--data", fevd.data, "Panel CSV the model was fitted on")->required();
  s_fevd->add_option("--model", fevd.model, "model.txt from the fit artifacts")->required();
  s_fevd->add_option("--affected", fevd.affected, "Affected variable index")->required();
  s_fevd->add_option("--shock", fevd.shock, "Shock column index")->required();
  s_fevd->add_option("--horizon", fevd.horizon, "Forecast horizon (>= 1)")
      ->capture_default_str();
  s_fevd->add_option("--delta", fevd.delta, "Tested lower bound; 0 = chi-square variant")
      ->capture_default_str();
  s_fevd->add_option("--alpha", fevd.alpha, "Test level")->capture_default_str();
  s_fevd->add_option("--out", fevd.out, "Optional single-row result CSV");
  s_fevd->callback([&]() { rc = hdsvar::cmd_fevd_test(fevd); });

  hdsvar::MontecarloArgs mc;
  auto* s_mc = app.add_subcommand("montecarlo", "Coverage experiment over simulated panels");
  s_mc->add_option("--config", mc.config, "Experiment config file (overrides preset)");
  s_mc->add_option("--preset", mc.preset, "Model preset when no config file is given")
      ->capture_default_str();
  s_mc->add_option("--mc-reps", mc.mc_reps, "Monte Carlo replicates");
  s_mc->add_option("--boot-reps", mc.boot_reps, "Bootstrap replicates per Monte Carlo run");
  s_mc->add_option("--method", mc.method, "Interval constructions to run")
      ->check(CLI::IsMember({"boot", "gaussian", "both"}));
  s_mc->add_option("--alpha", mc.alpha, "Nominal level is 1 - alpha");
  s_mc->add_option("--seed", mc.seed, "Master seed")->envname("HDSVAR_SEED");
  s_mc->add_option("--threads", mc.threads, "Replicate-level worker threads")
      ->envname("HDSVAR_THREADS");
  s_mc->add_option("--trace", mc.trace, "Optional per-replicate status CSV");
  s_mc->add_option("--out", mc.out, "Report CSV path")->required();
  s_mc->callback([&]() { rc = hdsvar::cmd_montecarlo(mc); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const hdsvar::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const hdsvar::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const hdsvar::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return rc;
}
