#include "hdsvar/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "hdsvar/csv.hpp"
#include "hdsvar/parallel.hpp"
#include "hdsvar/stats.hpp"

namespace hdsvar {

double BootstrapDistribution::quantile(Index target, double q) const {
  if (draws.rows() == 0) throw DataError("bootstrap distribution has no replicates");
  if (target < 0 || target >= draws.cols())
    throw DataError("bootstrap quantile: target out of range");
  std::vector<double> col(static_cast<std::size_t>(draws.rows()));
  for (Index b = 0; b < draws.rows(); ++b) col[static_cast<std::size_t>(b)] = draws(b, target);
  return stats::quantile_type7(col, q);
}

PseudoInnovations::PseudoInnovations(const MatrixXd& shock_pool, const MatrixXd& b_re,
                                     const MatrixXd& sigma_w_re)
    : pool_(shock_pool), b_re_(b_re) {
  if (pool_.rows() == 0) throw DataError("pseudo innovations: empty shock pool");
  if (b_re_.cols() != pool_.cols())
    throw DataError("pseudo innovations: impact width != shock dimension");
  if (sigma_w_re.rows() != sigma_w_re.cols() || sigma_w_re.rows() != b_re_.rows())
    throw DataError("pseudo innovations: noise covariance shape mismatch");
  const Eigen::RowVectorXd pool_mean = pool_.colwise().mean();
  pool_.rowwise() -= pool_mean;

  // Thresholding can leave the noise covariance indefinite; clip its spectrum at
  // zero so the Gaussian draw is well defined.
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (sigma_w_re + sigma_w_re.transpose()));
  if (eig.info() != Eigen::Success)
    throw NumericError("pseudo innovations: eigendecomposition failed");
  VectorXd vals = eig.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  if (vals.minCoeff() < -1e-12 * scale) {
    clipped_ = true;
    std::fprintf(stderr,
                 "warning: noise covariance clipped to PSD (min eigenvalue %.3e)\n",
                 vals.minCoeff());
  }
  vals = vals.cwiseMax(0.0);
  root_ = eig.eigenvectors() * vals.cwiseSqrt().asDiagonal() *
          eig.eigenvectors().transpose();
}

MatrixXd PseudoInnovations::draw(Index count, Rng& rng) const {
  const Index m = pool_.rows();
  const Index p = b_re_.rows();
  MatrixXd u(count, pool_.cols());
  for (Index t = 0; t < count; ++t)
    u.row(t) = pool_.row(static_cast<Index>(rng.uniform_int(static_cast<std::uint64_t>(m))));
  MatrixXd z(count, p);
  for (Index t = 0; t < count; ++t)
    for (Index i = 0; i < p; ++i) z(t, i) = rng.normal();
  MatrixXd eps(count, p);
  eps.noalias() = u * b_re_.transpose();
  eps.noalias() += z * root_.transpose();
  return eps;
}

MatrixXd pseudo_series(const std::vector<MatrixXd>& slopes, const PseudoInnovations& gen,
                       Index n, int burn_in, Rng& rng, bool check_stability) {
  if (n < 1) throw DataError("pseudo series: length must be positive");
  if (burn_in < 0) throw DataError("pseudo series: negative burn-in");
  const auto d = static_cast<int>(slopes.size());
  if (d < 1) throw DataError("pseudo series: no slope matrices");
  const Index p = slopes[0].rows();
  if (check_stability) {
    const double rho = spectral_radius(companion(slopes));
    if (rho >= 1.0)
      throw NumericError("pseudo series: unstable model (spectral radius " +
                         std::to_string(rho) + ")");
  }
  const Index total = n + burn_in;
  const MatrixXd eps = gen.draw(total, rng);
  MatrixXd x = MatrixXd::Zero(total, p);
  for (Index t = 0; t < total; ++t) {
    x.row(t) = eps.row(t);
    for (int s = 1; s <= d; ++s) {
      if (t - s < 0) break;  // zero starting values
      x.row(t).noalias() += x.row(t - s) * slopes[static_cast<std::size_t>(s - 1)].transpose();
    }
  }
  if (!x.allFinite()) throw NumericError("pseudo series diverged");
  return x.bottomRows(n);
}

BootstrapDistribution bootstrap_irf(const PipelineResult& fit, const PipelineConfig& cfg,
                                    const std::vector<BootTarget>& targets,
                                    const BootstrapConfig& bcfg) {
  if (bcfg.reps < 1) throw DataError("bootstrap: replicate count must be >= 1");
  if (targets.empty()) throw DataError("bootstrap: no targets");
  const auto k = static_cast<Index>(fit.shock_idx.size());
  int max_h = 0;
  for (const auto& t : targets) {
    if (t.h < 0 || t.h > fit.horizon) throw DataError("bootstrap: target horizon out of range");
    if (t.j < 0 || t.j >= fit.p) throw DataError("bootstrap: target variable out of range");
    if (t.r < 0 || t.r >= k) throw DataError("bootstrap: target shock out of range");
    max_h = std::max(max_h, t.h);
  }

  const double rho = spectral_radius(companion(fit.slopes_thr));
  if (rho >= 1.0)
    throw NumericError("bootstrap: thresholded model unstable (spectral radius " +
                       std::to_string(rho) + ")");

  BootstrapDistribution out;
  out.targets = targets;
  out.requested = bcfg.reps;
  const auto nt = static_cast<Index>(targets.size());
  out.centers.resize(nt);
  for (Index t = 0; t < nt; ++t)
    out.centers(t) =
        fit.theta_boot[static_cast<std::size_t>(targets[static_cast<std::size_t>(t)].h)](
            targets[static_cast<std::size_t>(t)].j, targets[static_cast<std::size_t>(t)].r);

  PipelineConfig rcfg = cfg;
  rcfg.horizon = max_h;
  rcfg.debias_rows.clear();
  for (const auto& t : targets) rcfg.debias_rows.push_back(t.j);
  if (bcfg.freeze_tuning) {
    rcfg.fixed_row_lambda = fit.fit.lambda;
    rcfg.covreg.fixed_lambda_b = fit.covreg.lambda_b;
    rcfg.covreg.fixed_lambda_w = fit.covreg.lambda_w;
  }

  const PseudoInnovations gen(fit.shocks, fit.covreg.b_hat_re, fit.covreg.sigma_w_re);
  const Rng master(bcfg.seed);
  const double sqrt_n = std::sqrt(static_cast<double>(fit.n));

  MatrixXd buffer(bcfg.reps, nt);
  std::vector<char> ok(static_cast<std::size_t>(bcfg.reps), 0);
  std::vector<std::string> reasons(static_cast<std::size_t>(bcfg.reps));

  parallel_for(bcfg.reps, bcfg.threads, [&](Index b) {
    try {
      Rng rng = master.child(static_cast<std::uint64_t>(b));
      const MatrixXd series = pseudo_series(fit.slopes_thr, gen, fit.n, bcfg.burn_in, rng,
                                            /*check_stability=*/false);
      const PipelineResult rfit = run_pipeline(series, rcfg);
      for (Index t = 0; t < nt; ++t) {
        const auto& target = targets[static_cast<std::size_t>(t)];
        const Index slot = rfit.debias_slot(target.j);
        buffer(b, t) =
            sqrt_n * (rfit.theta_de[static_cast<std::size_t>(target.h)](slot, target.r) -
                      out.centers(t));
      }
      ok[static_cast<std::size_t>(b)] = 1;
    } catch (const std::exception& e) {
      reasons[static_cast<std::size_t>(b)] = e.what();
    }
  });

  Index good = 0;
  for (char flag : ok) good += flag ? 1 : 0;
  out.failed = bcfg.reps - static_cast<int>(good);
  out.draws.resize(good, nt);
  Index row = 0;
  std::vector<Index> kept;
  kept.reserve(static_cast<std::size_t>(good));
  for (Index b = 0; b < bcfg.reps; ++b) {
    if (!ok[static_cast<std::size_t>(b)]) {
      if (out.failure_reasons.size() < 5)
        out.failure_reasons.push_back("replicate " + std::to_string(b) + ": " +
                                      reasons[static_cast<std::size_t>(b)]);
      continue;
    }
    out.draws.row(row++) = buffer.row(b);
    kept.push_back(b);
  }

  if (out.failed > bcfg.max_failure_share * bcfg.reps) {
    std::string msg = "bootstrap aborted: " + std::to_string(out.failed) + "/" +
                      std::to_string(bcfg.reps) + " replicates failed";
    for (const auto& r : out.failure_reasons) msg += "\n  " + r;
    throw NumericError(msg);
  }

  if (!bcfg.dump_path.empty()) {
    std::ofstream file(bcfg.dump_path);
    if (!file) throw DataError("cannot open replicate dump file: " + bcfg.dump_path);
    file << "replicate,h,j,r,value\n";
    for (Index i = 0; i < out.draws.rows(); ++i)
      for (Index t = 0; t < nt; ++t) {
        const auto& target = targets[static_cast<std::size_t>(t)];
        file << kept[static_cast<std::size_t>(i)] << ',' << target.h << ',' << target.j << ','
             << target.r << ',' << csv::format_double(out.draws(i, t)) << '\n';
      }
  }
  return out;
}

}  // namespace hdsvar
