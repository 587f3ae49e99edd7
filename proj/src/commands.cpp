#include "hdsvar/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hdsvar/bootstrap.hpp"
#include "hdsvar/csv.hpp"
#include "hdsvar/debias.hpp"
#include "hdsvar/dgp.hpp"
#include "hdsvar/inference.hpp"

namespace hdsvar {

namespace {

void write_rows(std::ostream& out, const MatrixXd& values) {
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ' ';
      out << csv::format_double(values(i, j));
    }
    out << '\n';
  }
}

MatrixXd read_rows(std::istream& in, Index rows, Index cols, const std::string& what) {
  MatrixXd values(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError("model file: truncated block " + what);
    std::istringstream row(line);
    std::string token;
    for (Index j = 0; j < cols; ++j) {
      if (!(row >> token)) throw DataError("model file: short row in block " + what);
      values(i, j) = csv::parse_double(token, what);
    }
    if (row >> token) throw DataError("model file: extra fields in block " + what);
  }
  return values;
}

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("model file: missing key " + key);
  if (line.rfind(key + ' ', 0) != 0 && line != key)
    throw DataError("model file: expected key " + key + ", got: " + line);
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

MatrixXd stack_slopes(const std::vector<MatrixXd>& slopes) {
  const Index p = slopes.empty() ? 0 : slopes.front().rows();
  MatrixXd out(static_cast<Index>(slopes.size()) * p, p);
  for (std::size_t s = 0; s < slopes.size(); ++s)
    out.middleRows(static_cast<Index>(s) * p, p) = slopes[s];
  return out;
}

std::vector<Index> resolve_vars(const std::vector<Index>& vars, Index p,
                                const std::string& flag) {
  std::vector<Index> out = vars;
  if (out.empty()) {
    out.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = j;
    return out;
  }
  for (Index j : out)
    if (j < 0 || j >= p) throw UsageError(flag + ": variable index out of range");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_alpha(double alpha, const std::string& cmd) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError(cmd + ": --alpha must lie in (0, 1)");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open output file: " + path);
  return file;
}

}  // namespace

ModelArtifact make_artifact(const PipelineResult& fit, bool centered) {
  ModelArtifact m;
  m.n = fit.n;
  m.p = fit.p;
  m.d = fit.d;
  m.centered = centered;
  m.shock_idx = fit.shock_idx;
  m.row_lambda = fit.fit.lambda;
  m.lambda_b = fit.covreg.lambda_b;
  m.lambda_w = fit.covreg.lambda_w;
  m.slopes = fit.fit.slopes;
  m.slopes_thr = fit.slopes_thr;
  m.b_tilde = fit.b_tilde;
  m.b_hat = fit.covreg.b_hat;
  m.b_hat_re = fit.covreg.b_hat_re;
  m.sigma_w = fit.covreg.sigma_w;
  m.sigma_w_re = fit.covreg.sigma_w_re;
  return m;
}

void save_model(const std::string& path, const ModelArtifact& m) {
  std::ofstream file = open_out(path);
  file << "hdsvar-model v1\n";
  file << "n " << m.n << "\np " << m.p << "\nd " << m.d << "\ncentered " << (m.centered ? 1 : 0)
       << '\n';
  file << "shock_idx";
  for (Index j : m.shock_idx) file << ' ' << j;
  file << '\n';
  file << "row_lambda";
  for (Index i = 0; i < m.row_lambda.size(); ++i) file << ' ' << csv::format_double(m.row_lambda(i));
  file << '\n';
  file << "lambda_b " << csv::format_double(m.lambda_b) << '\n';
  file << "lambda_w " << csv::format_double(m.lambda_w) << '\n';
  for (std::size_t s = 0; s < m.slopes.size(); ++s) {
    file << "A " << s + 1 << '\n';
    write_rows(file, m.slopes[s]);
  }
  for (std::size_t s = 0; s < m.slopes_thr.size(); ++s) {
    file << "A_THR " << s + 1 << '\n';
    write_rows(file, m.slopes_thr[s]);
  }
  file << "B_TILDE\n";
  write_rows(file, m.b_tilde);
  file << "B_HAT\n";
  write_rows(file, m.b_hat);
  file << "B_HAT_RE\n";
  write_rows(file, m.b_hat_re);
  file << "SIGMA_W\n";
  write_rows(file, m.sigma_w);
  file << "SIGMA_W_RE\n";
  write_rows(file, m.sigma_w_re);
  if (!file) throw DataError("write failed: " + path);
}

ModelArtifact load_model(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open model file: " + path);
  std::string line;
  if (!std::getline(file, line) || line != "hdsvar-model v1")
    throw DataError("model file: missing 'hdsvar-model v1' header");
  ModelArtifact m;
  auto scalar = [&](const std::string& key) {
    return csv::parse_double(expect_key(file, key), key);
  };
  m.n = static_cast<Index>(scalar("n"));
  m.p = static_cast<Index>(scalar("p"));
  m.d = static_cast<int>(scalar("d"));
  m.centered = scalar("centered") != 0.0;
  if (m.n <= m.d || m.p < 1 || m.d < 1) throw DataError("model file: invalid dimensions");
  {
    std::istringstream in(expect_key(file, "shock_idx"));
    Index j;
    while (in >> j) m.shock_idx.push_back(j);
    validate_shock_indices(m.shock_idx, m.p);
  }
  {
    std::istringstream in(expect_key(file, "row_lambda"));
    std::vector<double> vals;
    std::string token;
    while (in >> token) vals.push_back(csv::parse_double(token, "row_lambda"));
    if (static_cast<Index>(vals.size()) != m.p)
      throw DataError("model file: row_lambda must have one entry per variable");
    m.row_lambda = Eigen::Map<const VectorXd>(vals.data(), static_cast<Index>(vals.size()));
  }
  m.lambda_b = scalar("lambda_b");
  m.lambda_w = scalar("lambda_w");
  for (int s = 1; s <= m.d; ++s) {
    if (expect_key(file, "A") != std::to_string(s)) throw DataError("model file: slope blocks out of order");
    m.slopes.push_back(read_rows(file, m.p, m.p, "A"));
  }
  for (int s = 1; s <= m.d; ++s) {
    if (expect_key(file, "A_THR") != std::to_string(s))
      throw DataError("model file: thresholded slope blocks out of order");
    m.slopes_thr.push_back(read_rows(file, m.p, m.p, "A_THR"));
  }
  const auto k = static_cast<Index>(m.shock_idx.size());
  expect_key(file, "B_TILDE");
  m.b_tilde = read_rows(file, m.p, k, "B_TILDE");
  expect_key(file, "B_HAT");
  m.b_hat = read_rows(file, m.p, k, "B_HAT");
  expect_key(file, "B_HAT_RE");
  m.b_hat_re = read_rows(file, m.p, k, "B_HAT_RE");
  expect_key(file, "SIGMA_W");
  m.sigma_w = read_rows(file, m.p, m.p, "SIGMA_W");
  expect_key(file, "SIGMA_W_RE");
  m.sigma_w_re = read_rows(file, m.p, m.p, "SIGMA_W_RE");
  return m;
}

PipelineConfig resume_config(const ModelArtifact& m, int horizon,
                             std::vector<Index> debias_rows) {
  PipelineConfig cfg;
  cfg.d = m.d;
  cfg.horizon = horizon;
  cfg.shock_idx = m.shock_idx;
  cfg.center_panel = m.centered;
  cfg.debias_rows = std::move(debias_rows);
  cfg.fixed_row_lambda = m.row_lambda;
  cfg.covreg.fixed_lambda_b = m.lambda_b;
  cfg.covreg.fixed_lambda_w = m.lambda_w;
  return cfg;
}

PipelineResult resume_fit(const MatrixXd& x, const ModelArtifact& m,
                          const PipelineConfig& cfg) {
  if (x.rows() != m.n || x.cols() != m.p)
    throw DataError("model was fitted on a " + std::to_string(m.n) + " x " +
                    std::to_string(m.p) + " panel, got " + std::to_string(x.rows()) + " x " +
                    std::to_string(x.cols()));
  PipelineResult fit = run_pipeline(x, cfg);
  // The refit agrees with the stored fit up to the solver tolerance (warm starts
  // differ); a wrong panel deviates by orders of magnitude more.
  const double scale = 1.0 + m.b_tilde.cwiseAbs().maxCoeff();
  double gap = (fit.b_tilde - m.b_tilde).cwiseAbs().maxCoeff();
  for (std::size_t s = 0; s < m.slopes.size(); ++s)
    gap = std::max(gap, (fit.fit.slopes[s] - m.slopes[s]).cwiseAbs().maxCoeff());
  if (gap > 1e-4 * scale)
    throw DataError("model does not match the panel: refit deviates by " +
                    csv::format_double(gap));
  return fit;
}

int cmd_simulate(const SimulateArgs& a) {
  if (a.out.empty()) throw UsageError("simulate: --out is required");
  if (a.burn_in < 0) throw UsageError("simulate: --burn-in must be >= 0");
  DgpSpec spec = dgp_preset(a.preset);
  if (a.p >= 0) spec.p = a.p;
  if (a.n >= 0) spec.n = a.n;
  if (a.d >= 0) spec.d = a.d;
  if (a.k_a >= 0) spec.k_a = a.k_a;
  if (a.rho > 0.0) spec.rho_target = a.rho;
  if (a.k_u >= 0) {
    spec.k_u = a.k_u;
    spec.shock_idx.clear();
  }
  if (a.shock_of_interest >= 0) spec.shock_of_interest = a.shock_of_interest;
  if (a.k_b >= 0) spec.k_b = a.k_b;
  if (a.k_d >= 0) spec.k_d = a.k_d;
  if (!a.law.empty()) spec.law = parse_law(a.law);
  spec.validate();
  const GeneratedDgp dgp = generate_dgp(spec, a.seed);
  Rng rng(Rng::derive(a.seed, 0x51A));
  const TimeSeriesPanel panel = simulate(dgp, spec.n, a.burn_in, spec.law, rng);
  csv::write_panel(a.out, panel);
  if (!a.dgp_out.empty()) save_dgp(a.dgp_out, dgp);
  std::cout << "simulated " << panel.n() << " x " << panel.p() << " panel (lags " << spec.d
            << ", shocks " << spec.shocks().size() << ", " << law_name(spec.law) << ") -> "
            << a.out << '\n';
  return 0;
}

int cmd_fit(const FitArgs& a) {
  if (a.data.empty()) throw UsageError("fit: --data is required");
  if (a.out_dir.empty()) throw UsageError("fit: --out is required");
  if (a.d < 1) throw UsageError("fit: --lags must be >= 1");
  if (a.shocks.empty()) throw UsageError("fit: --shocks is required");
  const TimeSeriesPanel panel = csv::read_panel(a.data);
  if (panel.n() <= a.d)
    throw DataError("fit: panel has " + std::to_string(panel.n()) +
                    " rows; need more than the lag order " + std::to_string(a.d));
  PipelineConfig cfg;
  cfg.d = a.d;
  cfg.horizon = 0;
  cfg.shock_idx = a.shocks;
  cfg.lasso = a.lasso;
  cfg.covreg = a.covreg;
  cfg.center_panel = a.center;
  cfg.debias_rows = {0};  // fit artifacts carry no de-sparsified stacks
  const PipelineResult fit = run_pipeline(panel.x, cfg);

  std::filesystem::create_directories(a.out_dir);
  const std::string base = a.out_dir + "/";
  save_model(base + "model.txt", make_artifact(fit, a.center));
  csv::write_matrix_file(base + "slopes.csv", stack_slopes(fit.fit.slopes), {});
  csv::write_matrix_file(base + "slopes_thr.csv", stack_slopes(fit.slopes_thr), {});
  csv::write_matrix_file(base + "b_hat.csv", fit.covreg.b_hat, {});
  csv::write_matrix_file(base + "b_hat_re.csv", fit.covreg.b_hat_re, {});
  csv::write_matrix_file(base + "sigma_w_re.csv", fit.covreg.sigma_w_re, {});
  csv::write_matrix_file(base + "residuals.csv", fit.resid, {});
  csv::write_matrix_file(base + "shocks.csv", fit.shocks, {});
  MatrixXd diag(fit.p, 6);
  for (Index i = 0; i < fit.p; ++i) {
    diag(i, 0) = static_cast<double>(i);
    diag(i, 1) = fit.fit.lambda(i);
    diag(i, 2) = fit.fit.bic(i);
    diag(i, 3) = fit.fit.sweeps[static_cast<std::size_t>(i)];
    diag(i, 4) = fit.fit.converged[static_cast<std::size_t>(i)] ? 1 : 0;
    diag(i, 5) = fit.fit.degenerate[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  csv::write_matrix_file(base + "diagnostics.csv", diag,
                         {"row", "lambda", "bic", "sweeps", "converged", "degenerate"});
  std::cout << "fitted VAR(" << fit.d << ") on " << fit.n << " x " << fit.p
            << " panel; lambda_b " << csv::format_double(fit.covreg.lambda_b) << ", lambda_w "
            << csv::format_double(fit.covreg.lambda_w) << " -> " << a.out_dir << '\n';
  return 0;
}

int cmd_irf(const IrfArgs& a) {
  if (a.data.empty()) throw UsageError("irf: --data is required");
  if (a.model.empty()) throw UsageError("irf: --model is required");
  if (a.out.empty()) throw UsageError("irf: --out is required");
  if (a.horizon < 0) throw UsageError("irf: --horizon must be >= 0");
  const TimeSeriesPanel panel = csv::read_panel(a.data);
  const ModelArtifact m = load_model(a.model);
  const std::vector<Index> vars = resolve_vars(a.vars, m.p, "irf");
  const PipelineConfig cfg = resume_config(m, a.horizon, vars);
  const PipelineResult fit = resume_fit(panel.x, m, cfg);
  const auto k = static_cast<Index>(m.shock_idx.size());

  std::ofstream file = open_out(a.out);
  file << "h,j,r,theta_re,theta_de\n";
  for (int h = 0; h <= a.horizon; ++h)
    for (Index j : fit.debias_rows)
      for (Index r = 0; r < k; ++r)
        file << h << ',' << j << ',' << r << ','
             << csv::format_double(fit.theta_re[static_cast<std::size_t>(h)](j, r)) << ','
             << csv::format_double(
                    fit.theta_de[static_cast<std::size_t>(h)](fit.debias_slot(j), r))
             << '\n';
  if (!file) throw DataError("write failed: " + a.out);
  std::cout << "wrote " << (a.horizon + 1) * static_cast<int>(fit.debias_rows.size()) *
                               static_cast<int>(k)
            << " response rows -> " << a.out << '\n';
  return 0;
}

int cmd_ci(const CiArgs& a) {
  if (a.data.empty()) throw UsageError("ci: --data is required");
  if (a.model.empty()) throw UsageError("ci: --model is required");
  if (a.out.empty()) throw UsageError("ci: --out is required");
  if (a.horizon < 0) throw UsageError("ci: --horizon must be >= 0");
  check_alpha(a.alpha, "ci");
  if (a.method != "boot" && a.method != "gaussian")
    throw UsageError("ci: --method must be boot or gaussian");
  if (a.center != "de" && a.center != "re")
    throw UsageError("ci: --center must be de or re");
  if (a.method == "boot" && a.boot_reps < 1)
    throw UsageError("ci: --boot-reps must be >= 1 for the bootstrap method");
  const TimeSeriesPanel panel = csv::read_panel(a.data);
  const ModelArtifact m = load_model(a.model);
  const auto k = static_cast<Index>(m.shock_idx.size());
  if (a.shock >= k) throw UsageError("ci: --shock-of-interest out of range");
  const std::vector<Index> vars = resolve_vars(a.vars, m.p, "ci");
  const PipelineConfig cfg = resume_config(m, a.horizon, vars);
  const PipelineResult fit = resume_fit(panel.x, m, cfg);

  std::vector<Index> shocks;
  if (a.shock >= 0)
    shocks.push_back(a.shock);
  else
    for (Index r = 0; r < k; ++r) shocks.push_back(r);

  std::vector<BootTarget> targets;
  for (int h = 0; h <= a.horizon; ++h)
    for (Index j : fit.debias_rows)
      for (Index r : shocks) targets.push_back(BootTarget{h, j, r});

  std::ofstream file = open_out(a.out);
  file << "h,j,r,theta_re,theta_de,se,lower,upper,method,center\n";
  auto emit = [&](const BootTarget& tg, double se, const ConfidenceInterval& ci) {
    file << tg.h << ',' << tg.j << ',' << tg.r << ','
         << csv::format_double(fit.theta_re[static_cast<std::size_t>(tg.h)](tg.j, tg.r)) << ','
         << csv::format_double(
                fit.theta_de[static_cast<std::size_t>(tg.h)](fit.debias_slot(tg.j), tg.r))
         << ',' << csv::format_double(se) << ',' << csv::format_double(ci.lower) << ','
         << csv::format_double(ci.upper) << ',' << a.method << ',' << a.center << '\n';
  };

  if (a.method == "boot") {
    BootstrapConfig bcfg;
    bcfg.reps = a.boot_reps;
    bcfg.burn_in = a.burn_in;
    bcfg.seed = a.seed;
    bcfg.threads = a.threads;
    bcfg.freeze_tuning = a.freeze_tuning;
    const BootstrapDistribution dist = bootstrap_irf(fit, cfg, targets, bcfg);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto& tg = targets[t];
      const double center =
          a.center == "de"
              ? fit.theta_de[static_cast<std::size_t>(tg.h)](fit.debias_slot(tg.j), tg.r)
              : fit.theta_re[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
      const auto ci =
          ci_boot(dist, static_cast<Index>(t), center, a.center, fit.n, a.alpha);
      // Draw spread on the sqrt(n) scale, comparable to the delta-method se.
      const auto col = dist.draws.col(static_cast<Index>(t));
      double se = 0.0;
      if (col.size() > 1) {
        const double mean = col.mean();
        se = std::sqrt((col.array() - mean).square().sum() / (col.size() - 1));
      }
      emit(tg, se, ci);
    }
  } else {
    const ImpactVariance impact(fit.resid, fit.sigma_eps_sample, fit.b_tilde, fit.rot,
                                fit.shock_idx);
    const MaVarianceContext ctx = fit.ma_context();
    for (const auto& tg : targets) {
      const double se = theta_se(ctx, impact, fit.covreg.b_hat_re, tg.h, tg.j, tg.r);
      const double center =
          a.center == "de"
              ? fit.theta_de[static_cast<std::size_t>(tg.h)](fit.debias_slot(tg.j), tg.r)
              : fit.theta_re[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
      emit(tg, se, ci_gaussian(center, se, fit.n, a.alpha, tg, a.center));
    }
  }
  if (!file) throw DataError("write failed: " + a.out);
  std::cout << "wrote " << targets.size() << " " << a.method << "/" << a.center
            << " intervals -> " << a.out << '\n';
  return 0;
}

int cmd_fevd_test(const FevdTestArgs& a) {
  if (a.data.empty()) throw UsageError("fevd-test: --data is required");
  if (a.model.empty()) throw UsageError("fevd-test: --model is required");
  if (!(a.delta >= 0.0 && a.delta < 1.0))
    throw UsageError("fevd-test: --delta must lie in [0, 1)");
  if (a.horizon < 1) throw UsageError("fevd-test: --horizon must be >= 1");
  check_alpha(a.alpha, "fevd-test");
  const TimeSeriesPanel panel = csv::read_panel(a.data);
  const ModelArtifact m = load_model(a.model);
  const auto k = static_cast<Index>(m.shock_idx.size());
  if (a.affected < 0 || a.affected >= m.p)
    throw UsageError("fevd-test: --affected out of range");
  if (a.shock < 0 || a.shock >= k) throw UsageError("fevd-test: --shock out of range");
  const PipelineConfig cfg = resume_config(m, a.horizon, {a.affected});
  const PipelineResult fit = resume_fit(panel.x, m, cfg);
  const ImpactVariance impact(fit.resid, fit.sigma_eps_sample, fit.b_tilde, fit.rot,
                              fit.shock_idx);
  const double w_re =
      fevd(fit.theta_re, fit.psi_re, fit.sigma_eps_sample, a.affected, a.shock, a.horizon).w;

  FevdTestResult res;
  if (a.delta == 0.0) {
    const VectorXd theta = theta_de_path(fit, a.affected, a.shock, a.horizon);
    const MatrixXd sigma_t = fevd_sigma_t(fit, impact, a.affected, a.shock, a.horizon);
    res = fevd_test_zero(theta, sigma_t, fit.n, a.alpha);
  } else {
    res = fevd_test_delta(fit, impact, a.affected, a.shock, a.horizon, a.delta, a.alpha);
  }

  std::cout << "variant " << res.variant << "\nw_re " << csv::format_double(w_re)
            << "\nstatistic " << csv::format_double(res.statistic) << "\ncritical "
            << csv::format_double(res.critical) << "\np_value "
            << csv::format_double(res.p_value) << "\nreject " << (res.reject ? 1 : 0) << '\n';
  if (!a.out.empty()) {
    std::ofstream file = open_out(a.out);
    file << "i,j,h,delta,variant,w_re,statistic,critical,p_value,reject\n";
    file << a.affected << ',' << a.shock << ',' << a.horizon << ','
         << csv::format_double(a.delta) << ',' << res.variant << ','
         << csv::format_double(w_re) << ',' << csv::format_double(res.statistic) << ','
         << csv::format_double(res.critical) << ',' << csv::format_double(res.p_value) << ','
         << (res.reject ? 1 : 0) << '\n';
    if (!file) throw DataError("write failed: " + a.out);
  }
  return 0;
}

int cmd_montecarlo(const MontecarloArgs& a) {
  if (a.out.empty()) throw UsageError("montecarlo: --out is required");
  ExperimentConfig cfg;
  if (!a.config.empty())
    cfg = load_experiment_config(a.config);
  else
    cfg.dgp = dgp_preset(a.preset);
  if (a.mc_reps >= 0) cfg.mc_reps = a.mc_reps;
  if (a.boot_reps >= 0) cfg.boot.reps = a.boot_reps;
  if (!a.method.empty()) {
    if (a.method == "boot") {
      cfg.run_boot = true;
      cfg.run_gaussian = false;
    } else if (a.method == "gaussian") {
      cfg.run_boot = false;
      cfg.run_gaussian = true;
    } else if (a.method == "both") {
      cfg.run_boot = true;
      cfg.run_gaussian = true;
    } else {
      throw UsageError("montecarlo: --method must be boot, gaussian, or both");
    }
  }
  if (a.alpha > 0.0) cfg.alpha = a.alpha;
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.threads > 0) {
    cfg.threads = a.threads;
    cfg.boot.threads = 1;  // replicate-level parallelism only
  }
  if (!a.trace.empty()) cfg.trace_path = a.trace;
  cfg.validate();
  const ExperimentReport report = run_experiment(cfg);
  if (report.replicates_ok == 0) throw NumericError("montecarlo: every replicate failed");
  emit_report(report, a.out);
  std::cout << "replicates ok " << report.replicates_ok << ", failed "
            << report.replicates_failed << ", wall " << csv::format_double(report.wall_seconds)
            << "s -> " << a.out << '\n';
  for (const auto& reason : report.failure_reasons) std::cout << "  " << reason << '\n';
  return 0;
}

}  // namespace hdsvar
