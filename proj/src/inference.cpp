#include "hdsvar/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hdsvar/csv.hpp"
#include "hdsvar/stats.hpp"

namespace hdsvar {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must lie in (0, 1)");
}

}  // namespace

ConfidenceInterval ci_boot(const BootstrapDistribution& dist, Index target_index,
                           double center_value, const std::string& center_kind, Index n,
                           double alpha) {
  check_alpha(alpha);
  if (n < 1) throw DataError("ci_boot: sample size must be positive");
  if (center_kind != "de" && center_kind != "re")
    throw DataError("ci_boot: center kind must be de or re");
  if (target_index < 0 || target_index >= static_cast<Index>(dist.targets.size()))
    throw DataError("ci_boot: target index out of range");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double q_hi = dist.quantile(target_index, 1.0 - alpha / 2.0);
  const double q_lo = dist.quantile(target_index, alpha / 2.0);
  ConfidenceInterval ci;
  ci.lower = center_value - q_hi / sqrt_n;
  ci.upper = center_value - q_lo / sqrt_n;
  ci.level = 1.0 - alpha;
  ci.method = "boot";
  ci.center = center_kind;
  ci.target = dist.targets[static_cast<std::size_t>(target_index)];
  return ci;
}

ConfidenceInterval ci_gaussian(double center_value, double se_theta, Index n, double alpha,
                               const BootTarget& target, const std::string& center_kind) {
  check_alpha(alpha);
  if (n < 1) throw DataError("ci_gaussian: sample size must be positive");
  if (se_theta < 0.0) throw DataError("ci_gaussian: negative standard error");
  if (center_kind != "de" && center_kind != "re")
    throw DataError("ci_gaussian: center kind must be de or re");
  const double half = se_theta * stats::normal_quantile(1.0 - alpha / 2.0) /
                      std::sqrt(static_cast<double>(n));
  ConfidenceInterval ci;
  ci.lower = center_value - half;
  ci.upper = center_value + half;
  ci.level = 1.0 - alpha;
  ci.method = "gaussian";
  ci.center = center_kind;
  ci.target = target;
  return ci;
}

FevdEstimate fevd(const std::vector<MatrixXd>& theta, const std::vector<MatrixXd>& psi,
                  const MatrixXd& sigma_eps_sample, Index i, Index j, int h) {
  if (h < 1) throw DataError("fevd: horizon must be >= 1");
  if (static_cast<int>(theta.size()) < h || static_cast<int>(psi.size()) < h)
    throw DataError("fevd: not enough horizons in the response stacks");
  if (i < 0 || i >= psi[0].rows()) throw DataError("fevd: variable index out of range");
  if (j < 0 || j >= theta[0].cols()) throw DataError("fevd: shock index out of range");
  FevdEstimate out;
  out.i = i;
  out.j = j;
  out.h = h;
  for (int k = 0; k < h; ++k) {
    const auto& th = theta[static_cast<std::size_t>(k)];
    const auto& ps = psi[static_cast<std::size_t>(k)];
    out.numerator += th(i, j) * th(i, j);
    out.denominator += ps.row(i) * sigma_eps_sample * ps.row(i).transpose();
  }
  if (!(out.denominator > 0.0))
    throw NumericError("fevd: forecast-error variance is not positive");
  out.w = out.numerator / out.denominator;
  return out;
}

MatrixXd fevd_sigma_t(const PipelineResult& fit, const ImpactVariance& impact, Index i,
                      Index j, int h) {
  if (h < 1) throw DataError("fevd_sigma_t: horizon must be >= 1");
  if (h > fit.horizon) throw DataError("fevd_sigma_t: horizon exceeds the fitted range");
  if (i < 0 || i >= fit.p) throw DataError("fevd_sigma_t: variable index out of range");
  if (j < 0 || j >= static_cast<Index>(fit.shock_idx.size()))
    throw DataError("fevd_sigma_t: shock index out of range");
  const MaVarianceContext ctx = fit.ma_context();
  const VectorXd bcol = fit.covreg.b_hat_re.col(j);
  const double const_sd =
      impact.se(fit.psi_re[static_cast<std::size_t>(h)].row(i).transpose(), j);
  const double const_var = const_sd * const_sd;
  MatrixXd out(h, h);
  for (int h1 = 0; h1 < h; ++h1)
    for (int h2 = 0; h2 < h; ++h2) {
      const double cov = (h1 >= 1 && h2 >= 1) ? ma_cov(ctx, i, bcol, h1, h2) : 0.0;
      out(h1, h2) = cov + const_var;
    }
  return out;
}

VectorXd theta_de_path(const PipelineResult& fit, Index i, Index j, int h) {
  if (h < 1) throw DataError("theta path: horizon must be >= 1");
  if (h - 1 > fit.horizon) throw DataError("theta path: horizon exceeds the fitted range");
  if (j < 0 || j >= static_cast<Index>(fit.shock_idx.size()))
    throw DataError("theta path: shock index out of range");
  const Index slot = fit.debias_slot(i);
  VectorXd path(h);
  for (int k = 0; k < h; ++k) path(k) = fit.theta_de[static_cast<std::size_t>(k)](slot, j);
  return path;
}

FevdTestResult fevd_test_zero(const VectorXd& theta_de, const MatrixXd& sigma_t, Index n,
                              double alpha) {
  check_alpha(alpha);
  const Index h = theta_de.size();
  if (h < 1) throw DataError("zero test: empty response vector");
  if (sigma_t.rows() != h || sigma_t.cols() != h)
    throw DataError("zero test: covariance dimension mismatch");
  if (n < 1) throw DataError("zero test: sample size must be positive");

  FevdTestResult out;
  out.variant = "zero";
  out.sigma_t = sigma_t;
  Eigen::LLT<MatrixXd> llt(out.sigma_t);
  if (llt.info() != Eigen::Success) {
    out.jitter = 1e-10 * out.sigma_t.trace() / static_cast<double>(h);
    std::fprintf(stderr, "warning: test covariance repaired with ridge %.3e\n", out.jitter);
    out.sigma_t.diagonal().array() += out.jitter;
    llt.compute(out.sigma_t);
    if (llt.info() != Eigen::Success)
      throw NumericError("zero test: covariance not positive definite after repair");
  }
  out.statistic = theta_de.dot(llt.solve(theta_de));
  const auto df = static_cast<double>(h);
  const auto nn = static_cast<double>(n);
  out.critical = stats::chisq_quantile(1.0 - alpha, df) / nn;
  out.p_value = 1.0 - stats::chisq_cdf(nn * out.statistic, df);
  out.reject = out.statistic > out.critical;
  return out;
}

VectorXd fevd_kappa(const PipelineResult& fit, const ImpactVariance& impact, Index i,
                    Index j, int h) {
  if (h < 1) throw DataError("kappa: horizon must be >= 1");
  if (h > fit.horizon) throw DataError("kappa: horizon exceeds the fitted range");
  if (i < 0 || i >= fit.p) throw DataError("kappa: variable index out of range");
  if (j < 0 || j >= static_cast<Index>(fit.shock_idx.size()))
    throw DataError("kappa: shock index out of range");
  const Index p = fit.p;
  const Index vj = fit.shock_idx[static_cast<std::size_t>(j)];
  const auto& psi = fit.psi_re;
  const MatrixXd& sig = fit.covreg.sigma_eps_re;

  // Model-implied part: triple sum over horizons with the lag-compatibility
  // indicator k1 + k3 - k2 >= h, factored through powers of the companion matrix
  // applied to Gamma(0)^{-1} L B^re e_j.
  VectorXd rhs = VectorXd::Zero(fit.gamma->dim());
  rhs.head(p) = fit.covreg.b_hat_re.col(j);
  VectorXd z = fit.gamma->solve(rhs);
  const MatrixXd comp_re = companion(fit.fit.slopes);
  MatrixXd zs(p, h);  // column k2 = head of comp^{k2} z
  for (int k2 = 0; k2 < h; ++k2) {
    zs.col(k2) = z.head(p);
    if (k2 + 1 < h) z = comp_re * z;
  }
  MatrixXd c1(p, h);  // column k = Sigma_eps^re Psi_k' e_i
  for (int k = 0; k < h; ++k)
    c1.col(k) = sig * psi[static_cast<std::size_t>(k)].row(i).transpose();
  const MatrixXd f1 = c1.transpose() * zs;  // f1(k1, k2)
  VectorXd s3 = VectorXd::Zero(h);
  for (int k3 = 0; k3 < h; ++k3)
    for (int k1 = 0; k1 < h; ++k1)
      for (int k2 = 0; k2 < h; ++k2)
        if (k1 + k3 - k2 >= h) s3(k3) += f1(k1, k2);

  // Empirical part: covariance between the summed squared shock-row responses and
  // the per-period influence of horizon h1 on variable i.
  const MatrixXd& resid = fit.resid;
  const Index m = resid.rows();
  MatrixXd pv(p, h);  // column k = Psi_k' e_vj
  for (int k = 0; k < h; ++k)
    pv.col(k) = psi[static_cast<std::size_t>(k)].row(vj).transpose();
  const VectorXd xsum = (resid * pv).array().square().rowwise().sum();
  const double xmean = xsum.mean();

  VectorXd kappa(h);
  for (int h1 = 0; h1 < h; ++h1) {
    const VectorXd vrow = psi[static_cast<std::size_t>(h1)].row(i).transpose();
    const VectorXd y1 = resid * vrow;
    const VectorXd w = impact.jacobian(j).transpose() * (impact.b_tilde().transpose() * vrow);
    const VectorXd rot = impact.vech_centered() * w;
    const VectorXd y = y1.array() * (fit.shocks.col(j) + rot).array();
    const double cov =
        ((xsum.array() - xmean) * (y.array() - y.mean())).sum() / static_cast<double>(m);
    double t1 = 0.0;
    for (int k3 = 0; k3 < h; ++k3) t1 += pv.col(h1).dot(c1.col(k3)) * s3(k3);
    kappa(h1) = t1 + cov;
  }
  if (!kappa.allFinite()) throw NumericError("kappa: non-finite covariance entries");
  return kappa;
}

VectorXd forecast_error_series(const PipelineResult& fit, Index i, int h) {
  if (h < 1) throw DataError("forecast errors: horizon must be >= 1");
  if (h > fit.horizon) throw DataError("forecast errors: horizon exceeds the fitted range");
  if (i < 0 || i >= fit.p) throw DataError("forecast errors: variable index out of range");
  const Index window = fit.lagrows.rows() - h;
  if (window < 2) throw DataError("forecast errors: window too short");
  const MatrixXd& xi_h = fit.xi_re[static_cast<std::size_t>(h)];
  return fit.lagrows.col(i).segment(h, window) -
         fit.lagrows.topRows(window) * xi_h.row(i).transpose();
}

double fevd_f_u2(const VectorXd& u, int h) {
  if (h < 1) throw DataError("long-run variance: horizon must be >= 1");
  const Index t = u.size();
  if (t < h) throw DataError("long-run variance: series shorter than the horizon");
  const VectorXd sq = u.array().square();
  const double mean = sq.mean();
  double f0 = 0.0;
  for (int k = 0; k < h; ++k) {
    double acc = 0.0;
    for (Index s = 0; s + k < t; ++s) acc += (sq(s) - mean) * (sq(s + k) - mean);
    acc /= static_cast<double>(t);
    f0 += acc * (k > 0 ? 2.0 : 1.0);
  }
  return f0;
}

FevdTestResult fevd_test_delta(const PipelineResult& fit, const ImpactVariance& impact,
                               Index i, Index j, int h, double delta, double alpha) {
  check_alpha(alpha);
  if (!(delta > 0.0 && delta < 1.0)) throw DataError("delta test: delta must be in (0, 1)");
  const VectorXd theta = theta_de_path(fit, i, j, h);
  const VectorXd u = forecast_error_series(fit, i, h);
  const auto t = static_cast<double>(u.size());
  const double var_u = (u.array() - u.mean()).square().sum() / t;
  if (!(var_u > 0.0)) throw NumericError("delta test: forecast-error variance is zero");
  const double w_de = theta.squaredNorm() / var_u;

  const MatrixXd sigma_t = fevd_sigma_t(fit, impact, i, j, h);
  const VectorXd kappa = fevd_kappa(fit, impact, i, j, h);
  const double f0 = fevd_f_u2(u, h);

  VectorXd grad(h + 1);
  grad.head(h) = 2.0 * theta;
  grad(h) = -theta.squaredNorm() / (var_u * var_u);
  MatrixXd sandwich(h + 1, h + 1);
  sandwich.topLeftCorner(h, h) = sigma_t;
  sandwich.topRightCorner(h, 1) = kappa;
  sandwich.bottomLeftCorner(1, h) = kappa.transpose();
  sandwich(h, h) = f0;
  double var = grad.dot(sandwich * grad);
  if (var < 0.0) {
    std::fprintf(stderr, "warning: delta-test variance clipped to zero (value %.3e)\n", var);
    var = 0.0;
  }
  const double sigma = std::sqrt(var);
  const auto sqrt_n = std::sqrt(static_cast<double>(fit.n));

  FevdTestResult out;
  out.variant = "delta";
  out.delta = delta;
  out.sigma_t = sigma_t;
  out.sigma_scalar = sigma;
  out.statistic = w_de;
  out.critical = delta + stats::normal_quantile(1.0 - alpha) * sigma / sqrt_n;
  out.reject = out.statistic > out.critical;
  if (sigma > 0.0)
    out.p_value = 1.0 - stats::normal_cdf(sqrt_n * (w_de - delta) / sigma);
  else
    out.p_value = w_de > delta ? 0.0 : 1.0;
  return out;
}

std::vector<FevdEdge> fevd_network_threshold(const std::vector<FevdEstimate>& grid,
                                             double tau) {
  std::vector<FevdEdge> out;
  out.reserve(grid.size());
  for (const auto& est : grid) {
    FevdEdge e;
    e.i = est.i;
    e.j = est.j;
    e.h = est.h;
    e.w = est.w;
    e.stat = est.w;
    e.p_value = std::numeric_limits<double>::quiet_NaN();
    e.edge = est.w > tau;
    out.push_back(e);
  }
  return out;
}

std::vector<FevdEdge> fevd_network_bh(const std::vector<FevdEstimate>& grid,
                                      const std::vector<FevdTestResult>& tests, double q) {
  if (grid.size() != tests.size())
    throw DataError("network: estimate grid and test list differ in size");
  if (!(q > 0.0 && q < 1.0)) throw DataError("network: FDR level must be in (0, 1)");
  std::vector<double> pvals(tests.size());
  for (std::size_t k = 0; k < tests.size(); ++k) pvals[k] = tests[k].p_value;
  const std::vector<double> adjusted = stats::bh_adjust(pvals);
  std::vector<FevdEdge> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    FevdEdge e;
    e.i = grid[k].i;
    e.j = grid[k].j;
    e.h = grid[k].h;
    e.w = grid[k].w;
    e.stat = tests[k].statistic;
    e.p_value = adjusted[k];
    e.edge = adjusted[k] <= q;
    out.push_back(e);
  }
  return out;
}

void write_fevd_csv(const std::string& path, const std::vector<FevdEdge>& rows) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open output file: " + path);
  file << "i,j,h,w_hat,stat,p_value,edge\n";
  for (const auto& r : rows)
    file << r.i << ',' << r.j << ',' << r.h << ',' << csv::format_double(r.w) << ','
         << csv::format_double(r.stat) << ',' << csv::format_double(r.p_value) << ','
         << (r.edge ? 1 : 0) << '\n';
}

void write_edge_list(const std::string& path, const std::vector<FevdEdge>& rows) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open output file: " + path);
  for (const auto& r : rows)
    if (r.edge) file << r.i << ' ' << r.j << ' ' << csv::format_double(r.w) << '\n';
}

}  // namespace hdsvar
