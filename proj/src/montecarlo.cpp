#include "hdsvar/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "hdsvar/csv.hpp"
#include "hdsvar/debias.hpp"
#include "hdsvar/inference.hpp"
#include "hdsvar/parallel.hpp"

namespace hdsvar {

void ExperimentConfig::validate() const {
  dgp.validate();
  if (mc_reps < 1) throw DataError("experiment: replicate count must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("experiment: alpha must be in (0, 1)");
  if (!run_boot && !run_gaussian) throw DataError("experiment: no methods selected");
  if (run_boot && boot.reps < 1) throw DataError("experiment: bootstrap replicates must be >= 1");
  if (sim_burn_in < 0) throw DataError("experiment: negative burn-in");
  if (track_limit < 1) throw DataError("experiment: track limit must be >= 1");
  for (int h : horizon_list())
    if (h < 0) throw DataError("experiment: negative horizon");
}

std::vector<int> ExperimentConfig::horizon_list() const {
  std::vector<int> hs = horizons;
  if (hs.empty())
    for (int h = 0; h <= 20; ++h) hs.push_back(h);
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  return hs;
}

std::vector<Index> ExperimentConfig::tracked_vars() const {
  const Index count = std::min(dgp.p, track_limit);
  std::vector<Index> vars(static_cast<std::size_t>(count));
  for (Index j = 0; j < count; ++j) vars[static_cast<std::size_t>(j)] = j;
  return vars;
}

namespace {

constexpr const char* kBandNames[3] = {"below", "shock", "above"};

int band_of(Index j, Index var_r) { return j < var_r ? 0 : (j == var_r ? 1 : 2); }

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> horizons = cfg.horizon_list();
  const std::vector<Index> tracked = cfg.tracked_vars();
  const std::vector<Index> shock_set = cfg.dgp.shocks();
  const Index r = cfg.dgp.shock_of_interest;
  const Index var_r = shock_set[static_cast<std::size_t>(r)];
  const int max_h = horizons.back();

  std::vector<BootTarget> targets;
  for (Index j : tracked)
    for (int h : horizons) targets.push_back(BootTarget{h, j, r});
  const auto nt = static_cast<Index>(targets.size());

  const int reps = cfg.mc_reps;
  // Index-addressed result slots keep the aggregation independent of worker
  // scheduling. Columns: covered-de, covered-re, length per method.
  MatrixXd boot_res, gauss_res;
  if (cfg.run_boot) boot_res = MatrixXd::Zero(reps, 3 * nt);
  if (cfg.run_gaussian) gauss_res = MatrixXd::Zero(reps, 3 * nt);
  std::vector<char> ok(static_cast<std::size_t>(reps), 0);
  std::vector<std::string> reasons(static_cast<std::size_t>(reps));

  const Rng master(cfg.seed);
  parallel_for(static_cast<std::size_t>(reps), cfg.threads, [&](std::size_t rep) {
    try {
      const std::uint64_t rep_seed = master.child(rep).seed();
      const GeneratedDgp dgp = generate_dgp(cfg.dgp, Rng::derive(rep_seed, 1));
      Rng sim_rng(Rng::derive(rep_seed, 2));
      const TimeSeriesPanel panel =
          simulate(dgp, cfg.dgp.n, cfg.sim_burn_in, cfg.dgp.law, sim_rng);
      const std::vector<MatrixXd> truth = dgp.theta(max_h);

      PipelineConfig pcfg;
      pcfg.d = cfg.dgp.d;
      pcfg.horizon = max_h;
      pcfg.shock_idx = dgp.spec.shock_idx;
      pcfg.lasso = cfg.lasso;
      pcfg.covreg = cfg.covreg;
      pcfg.debias_rows = tracked;
      const PipelineResult fit = run_pipeline(panel.x, pcfg);

      if (cfg.run_boot) {
        BootstrapConfig bcfg = cfg.boot;
        bcfg.seed = Rng::derive(rep_seed, 3);
        const BootstrapDistribution dist = bootstrap_irf(fit, pcfg, targets, bcfg);
        for (Index t = 0; t < nt; ++t) {
          const auto& tg = targets[static_cast<std::size_t>(t)];
          const double truth_v = truth[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
          const double de_center =
              fit.theta_de[static_cast<std::size_t>(tg.h)](fit.debias_slot(tg.j), tg.r);
          const double re_center = fit.theta_re[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
          const auto ci_de = ci_boot(dist, t, de_center, "de", fit.n, cfg.alpha);
          const auto ci_re = ci_boot(dist, t, re_center, "re", fit.n, cfg.alpha);
          boot_res(rep, 3 * t + 0) = (ci_de.lower <= truth_v && truth_v <= ci_de.upper) ? 1 : 0;
          boot_res(rep, 3 * t + 1) = (ci_re.lower <= truth_v && truth_v <= ci_re.upper) ? 1 : 0;
          boot_res(rep, 3 * t + 2) = ci_re.upper - ci_re.lower;
        }
      }

      if (cfg.run_gaussian) {
        const ImpactVariance impact(fit.resid, fit.sigma_eps_sample, fit.b_tilde, fit.rot,
                                    fit.shock_idx);
        const MaVarianceContext ctx = fit.ma_context();
        for (Index t = 0; t < nt; ++t) {
          const auto& tg = targets[static_cast<std::size_t>(t)];
          const double truth_v = truth[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
          const double se = theta_se(ctx, impact, fit.covreg.b_hat_re, tg.h, tg.j, tg.r);
          const double de_center =
              fit.theta_de[static_cast<std::size_t>(tg.h)](fit.debias_slot(tg.j), tg.r);
          const double re_center = fit.theta_re[static_cast<std::size_t>(tg.h)](tg.j, tg.r);
          const auto ci_de = ci_gaussian(de_center, se, fit.n, cfg.alpha, tg, "de");
          const auto ci_re = ci_gaussian(re_center, se, fit.n, cfg.alpha, tg, "re");
          gauss_res(rep, 3 * t + 0) = (ci_de.lower <= truth_v && truth_v <= ci_de.upper) ? 1 : 0;
          gauss_res(rep, 3 * t + 1) = (ci_re.lower <= truth_v && truth_v <= ci_re.upper) ? 1 : 0;
          gauss_res(rep, 3 * t + 2) = ci_re.upper - ci_re.lower;
        }
      }
      ok[rep] = 1;
    } catch (const std::exception& e) {
      reasons[rep] = e.what();
    }
  });

  ExperimentReport report;
  for (int rep = 0; rep < reps; ++rep) {
    if (ok[static_cast<std::size_t>(rep)]) {
      ++report.replicates_ok;
    } else {
      ++report.replicates_failed;
      if (report.failure_reasons.size() < 5)
        report.failure_reasons.push_back("replicate " + std::to_string(rep) + ": " +
                                         reasons[static_cast<std::size_t>(rep)]);
    }
  }

  // Aggregate into (method, center, horizon, band) cells in a fixed order.
  Index band_size[3] = {0, 0, 0};
  for (Index j : tracked) ++band_size[band_of(j, var_r)];
  const auto nh = static_cast<int>(horizons.size());
  auto aggregate = [&](const MatrixXd& res, const std::string& method) {
    std::vector<double> cover_de(static_cast<std::size_t>(nh * 3), 0.0);
    std::vector<double> cover_re(static_cast<std::size_t>(nh * 3), 0.0);
    std::vector<double> length(static_cast<std::size_t>(nh * 3), 0.0);
    std::vector<int> count(static_cast<std::size_t>(nh * 3), 0);
    for (int rep = 0; rep < reps; ++rep) {
      if (!ok[static_cast<std::size_t>(rep)]) continue;
      for (Index t = 0; t < nt; ++t) {
        const auto& tg = targets[static_cast<std::size_t>(t)];
        const int hpos =
            static_cast<int>(std::lower_bound(horizons.begin(), horizons.end(), tg.h) -
                             horizons.begin());
        const auto cell = static_cast<std::size_t>(hpos * 3 + band_of(tg.j, var_r));
        cover_de[cell] += res(rep, 3 * t + 0);
        cover_re[cell] += res(rep, 3 * t + 1);
        length[cell] += res(rep, 3 * t + 2);
        ++count[cell];
      }
    }
    for (const char* center : {"de", "re"})
      for (int hpos = 0; hpos < nh; ++hpos)
        for (int band = 0; band < 3; ++band) {
          if (band_size[band] == 0) continue;
          const auto cell = static_cast<std::size_t>(hpos * 3 + band);
          ExperimentCell out;
          out.method = method;
          out.center = center;
          out.horizon = horizons[static_cast<std::size_t>(hpos)];
          out.band = kBandNames[band];
          out.n_ok = count[cell];
          out.n_fail = report.replicates_failed * static_cast<int>(band_size[band]);
          if (count[cell] > 0) {
            const auto& cover = std::string(center) == "de" ? cover_de : cover_re;
            out.coverage = cover[cell] / count[cell];
            out.length = length[cell] / count[cell];
          }
          report.cells.push_back(out);
        }
  };
  if (cfg.run_boot) aggregate(boot_res, "boot");
  if (cfg.run_gaussian) aggregate(gauss_res, "gaussian");

  if (!cfg.trace_path.empty()) {
    std::ofstream file(cfg.trace_path);
    if (!file) throw DataError("cannot open trace file: " + cfg.trace_path);
    file << "replicate,status,message\n";
    for (int rep = 0; rep < reps; ++rep) {
      std::string msg = reasons[static_cast<std::size_t>(rep)];
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      file << rep << ',' << (ok[static_cast<std::size_t>(rep)] ? "ok" : "fail") << ',' << msg
           << '\n';
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void emit_report(const ExperimentReport& report, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open report file: " + path);
  file << "method,centering,horizon,band,coverage,length,n_ok,n_fail\n";
  for (const auto& c : report.cells)
    file << c.method << ',' << c.center << ',' << c.horizon << ',' << c.band << ','
         << csv::format_double(c.coverage) << ',' << csv::format_double(c.length) << ','
         << c.n_ok << ',' << c.n_fail << '\n';
  if (!file) throw DataError("write failed: " + path);
}

ExperimentReport read_report(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open report file: " + path);
  std::string line;
  if (!std::getline(file, line) || line != "method,centering,horizon,band,coverage,length,n_ok,n_fail")
    throw DataError("report file: unexpected header");
  ExperimentReport report;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    std::istringstream in(line);
    ExperimentCell c;
    std::string field;
    auto next = [&]() {
      if (!std::getline(in, field, ',')) throw DataError("report file: short row");
      return field;
    };
    c.method = next();
    c.center = next();
    c.horizon = std::stoi(next());
    c.band = next();
    c.coverage = csv::parse_double(next(), "coverage");
    c.length = csv::parse_double(next(), "length");
    c.n_ok = std::stoi(next());
    c.n_fail = std::stoi(next());
    report.cells.push_back(c);
  }
  return report;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open experiment config: " + path);
  std::string line;
  if (!std::getline(file, line) || line != "hdsvar-mc v1")
    throw DataError("experiment config: missing 'hdsvar-mc v1' header");
  ExperimentConfig cfg;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    auto num = [&](const std::string& what) {
      std::string tok;
      if (!(in >> tok)) throw DataError("experiment config: missing value for " + what);
      return csv::parse_double(tok, what);
    };
    if (key == "preset") {
      std::string name;
      in >> name;
      cfg.dgp = dgp_preset(name);
    } else if (key == "p") {
      cfg.dgp.p = static_cast<Index>(num(key));
    } else if (key == "n") {
      cfg.dgp.n = static_cast<Index>(num(key));
    } else if (key == "d") {
      cfg.dgp.d = static_cast<int>(num(key));
    } else if (key == "k_a") {
      cfg.dgp.k_a = static_cast<Index>(num(key));
    } else if (key == "rho") {
      cfg.dgp.rho_target = num(key);
    } else if (key == "k_u") {
      cfg.dgp.k_u = static_cast<Index>(num(key));
      cfg.dgp.shock_idx.clear();
    } else if (key == "shock_of_interest") {
      cfg.dgp.shock_of_interest = static_cast<Index>(num(key));
    } else if (key == "k_b") {
      cfg.dgp.k_b = static_cast<Index>(num(key));
    } else if (key == "k_d") {
      cfg.dgp.k_d = static_cast<Index>(num(key));
    } else if (key == "law") {
      std::string name;
      in >> name;
      cfg.dgp.law = parse_law(name);
    } else if (key == "mc_reps") {
      cfg.mc_reps = static_cast<int>(num(key));
    } else if (key == "horizons") {
      cfg.horizons.clear();
      int h;
      while (in >> h) cfg.horizons.push_back(h);
    } else if (key == "methods") {
      cfg.run_boot = false;
      cfg.run_gaussian = false;
      std::string m;
      while (in >> m) {
        if (m == "boot")
          cfg.run_boot = true;
        else if (m == "gaussian")
          cfg.run_gaussian = true;
        else
          throw DataError("experiment config: unknown method " + m);
      }
    } else if (key == "alpha") {
      cfg.alpha = num(key);
    } else if (key == "boot_reps") {
      cfg.boot.reps = static_cast<int>(num(key));
    } else if (key == "boot_burn_in") {
      cfg.boot.burn_in = static_cast<int>(num(key));
    } else if (key == "freeze_tuning") {
      cfg.boot.freeze_tuning = num(key) != 0.0;
    } else if (key == "sim_burn_in") {
      cfg.sim_burn_in = static_cast<int>(num(key));
    } else if (key == "track_limit") {
      cfg.track_limit = static_cast<Index>(num(key));
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(num(key));
    } else if (key == "boot_threads") {
      cfg.boot.threads = static_cast<int>(num(key));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(num(key));
    } else if (key == "trace") {
      in >> cfg.trace_path;
    } else if (key == "lasso_grid") {
      cfg.lasso.grid_size = static_cast<int>(num(key));
    } else if (key == "lasso_min_ratio") {
      cfg.lasso.grid_min_ratio = num(key);
    } else if (key == "threshold_grid") {
      cfg.covreg.grid_size = static_cast<int>(num(key));
    } else if (key == "cv_folds") {
      cfg.covreg.folds = static_cast<int>(num(key));
    } else {
      throw DataError("experiment config: unknown key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace hdsvar
