#include "hdsvar/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "hdsvar/kernels.hpp"
#include "hdsvar/model.hpp"

namespace hdsvar {
namespace {

inline double soft(double z, double thr) {
  if (z > thr) return z - thr;
  if (z < -thr) return z + thr;
  return 0.0;
}

// One pass over the coordinates in `idx`; returns the largest |update|.
// rho = X'y - X'X c is maintained incrementally (axpy on Gram columns).
double sweep(const MatrixXd& gram, Index nobs, const VectorXd& weights, double lambda,
             VectorXd& coef, VectorXd& rho, const Index* idx, Index count) {
  const auto& k = kernels::active_ops();
  const auto q = static_cast<std::size_t>(gram.rows());
  double max_delta = 0.0;
  for (Index ii = 0; ii < count; ++ii) {
    const Index s = idx ? idx[ii] : ii;
    const double gss = gram(s, s);
    if (gss <= 0.0) continue;  // degenerate column: coefficient stays at zero
    const double g = rho(s) + gss * coef(s);
    const double thr = 0.5 * lambda * weights(s) * static_cast<double>(nobs);
    const double cnew = soft(g, thr) / gss;
    const double delta = cnew - coef(s);
    if (delta != 0.0) {
      k.axpy(-delta, gram.col(s).data(), rho.data(), q);
      coef(s) = cnew;
      max_delta = std::max(max_delta, std::abs(delta));
    }
  }
  return max_delta;
}

// Stationarity gap from a gradient vector rho ~= X'y - X'X c.
double kkt_gap_from_rho(const VectorXd& rho, Index nobs, const VectorXd& weights, double lambda,
                        const VectorXd& coef) {
  const double scale = 2.0 / static_cast<double>(nobs);
  double worst = 0.0;
  for (Index s = 0; s < rho.size(); ++s) {
    const double g = scale * rho(s);
    const double bound = lambda * weights(s);
    if (coef(s) == 0.0)
      worst = std::max(worst, std::abs(g) - bound);
    else
      worst = std::max(worst, std::abs(g - bound * (coef(s) > 0.0 ? 1.0 : -1.0)));
  }
  return worst;
}

}  // namespace

int coordinate_descent_gram(const MatrixXd& gram, const VectorXd& xty, Index nobs,
                            const VectorXd& weights, double lambda, VectorXd& coef,
                            const LassoConfig& cfg, bool* converged) {
  const Index q = gram.rows();
  if (xty.size() != q || weights.size() != q) throw DataError("coordinate descent: size mismatch");
  if (coef.size() != q) coef = VectorXd::Zero(q);
  if (nobs <= 0) throw DataError("coordinate descent: nobs must be positive");
  if (lambda < 0.0) throw DataError("coordinate descent: negative penalty");

  VectorXd rho = xty;
  if (!coef.isZero(0.0)) {
    const auto& k = kernels::active_ops();
    for (Index s = 0; s < q; ++s)
      if (coef(s) != 0.0) k.axpy(-coef(s), gram.col(s).data(), rho.data(), static_cast<std::size_t>(q));
  }

  std::vector<Index> active;
  active.reserve(static_cast<std::size_t>(q));
  int sweeps = 0;
  bool ok = false;
  while (sweeps < cfg.max_sweeps) {
    const double full_delta = sweep(gram, nobs, weights, lambda, coef, rho, nullptr, q);
    ++sweeps;
    if (full_delta < cfg.tol &&
        kkt_gap_from_rho(rho, nobs, weights, lambda, coef) <= 8.0 * cfg.tol) {
      ok = true;
      break;
    }
    active.clear();
    for (Index s = 0; s < q; ++s)
      if (coef(s) != 0.0) active.push_back(s);
    while (sweeps < cfg.max_sweeps && !active.empty()) {
      const double delta = sweep(gram, nobs, weights, lambda, coef, rho,
                                 active.data(), static_cast<Index>(active.size()));
      ++sweeps;
      if (delta < cfg.tol) break;
    }
  }
  if (converged) *converged = ok;
  return sweeps;
}

double gram_rss(const MatrixXd& gram, const VectorXd& xty, double yty, const VectorXd& coef) {
  double quad = 0.0, lin = 0.0;
  for (Index s = 0; s < coef.size(); ++s) {
    if (coef(s) == 0.0) continue;
    lin += coef(s) * xty(s);
    quad += coef(s) * gram.col(s).dot(coef);
  }
  return std::max(yty - 2.0 * lin + quad, 0.0);
}

double kkt_violation(const MatrixXd& gram, const VectorXd& xty, Index nobs,
                     const VectorXd& weights, double lambda, const VectorXd& coef) {
  VectorXd rho = xty;
  rho.noalias() -= gram * coef;
  return std::max(kkt_gap_from_rho(rho, nobs, weights, lambda, coef), 0.0);
}

RowFit adaptive_lasso_row(const MatrixXd& gram, const VectorXd& xty, double yty, Index nobs,
                          Index n_weight, const LassoConfig& cfg, double fixed_lambda) {
  const Index q = gram.rows();
  RowFit fit;
  fit.coef = VectorXd::Zero(q);
  fit.stage1 = VectorXd::Zero(q);

  // lambda_max: smallest penalty at which the plain lasso is identically zero.
  const double lambda_max = (2.0 / static_cast<double>(nobs)) * xty.cwiseAbs().maxCoeff();
  if (lambda_max <= 0.0 && fixed_lambda < 0.0) {
    fit.degenerate = true;
    fit.bic = static_cast<double>(nobs) * std::log(std::max(yty / static_cast<double>(nobs), 1e-300));
    return fit;
  }

  std::vector<double> grid;
  if (fixed_lambda >= 0.0) {
    grid.push_back(fixed_lambda);
  } else {
    const int k = std::max(cfg.grid_size, 1);
    grid.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
      grid.push_back(k == 1 ? lambda_max
                            : lambda_max * std::pow(cfg.grid_min_ratio,
                                                    static_cast<double>(i) / static_cast<double>(k - 1)));
  }

  const VectorXd ones = VectorXd::Ones(q);
  const double inv_root_n = 1.0 / std::sqrt(static_cast<double>(n_weight));
  VectorXd stage1 = VectorXd::Zero(q);   // warm-started down the path
  VectorXd stage2 = VectorXd::Zero(q);
  VectorXd weights(q);
  for (double lambda : grid) {
    bool conv1 = false, conv2 = false;
    fit.sweeps += coordinate_descent_gram(gram, xty, nobs, ones, lambda, stage1, cfg, &conv1);
    for (Index s = 0; s < q; ++s) weights(s) = 1.0 / (inv_root_n + std::abs(stage1(s)));
    fit.sweeps += coordinate_descent_gram(gram, xty, nobs, weights, lambda, stage2, cfg, &conv2);
    fit.converged = fit.converged && conv1 && conv2;

    const double rss = std::max(gram_rss(gram, xty, yty, stage2), 1e-300);
    const auto df = static_cast<double>((stage2.array() != 0.0).count());
    const double bic = static_cast<double>(nobs) * std::log(rss / static_cast<double>(nobs)) +
                       std::log(static_cast<double>(nobs)) * df;
    if (bic < fit.bic) {  // strict: ties keep the earlier (sparser, larger) penalty
      fit.bic = bic;
      fit.lambda = lambda;
      fit.coef = stage2;
      fit.stage1 = stage1;
    }
  }
  return fit;
}

VarFit fit_var(const MatrixXd& x, int d, const LassoConfig& cfg,
               const VectorXd* fixed_row_lambda) {
  const Index n = x.rows(), p = x.cols();
  if (d < 1) throw DataError("fit_var: lag order must be >= 1");
  if (n <= d + 1) throw DataError("fit_var: panel too short for the lag order");
  if (fixed_row_lambda && fixed_row_lambda->size() != p)
    throw DataError("fit_var: fixed penalty vector length != p");
  const Index nobs = n - d;
  const Index q = static_cast<Index>(d) * p;

  // Shared design: rows W_{d-1}..W_{n-2} explain X_d..X_{n-1}; columns centered.
  MatrixXd design = lag_matrix(x, d).topRows(nobs);
  design.rowwise() -= design.colwise().mean();
  MatrixXd gram = MatrixXd::Zero(q, q);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(design.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  VarFit out;
  out.slopes.assign(static_cast<std::size_t>(d), MatrixXd::Zero(p, p));
  out.stage1 = MatrixXd::Zero(p, q);
  out.lambda = VectorXd::Zero(p);
  out.bic = VectorXd::Zero(p);
  out.sweeps.resize(static_cast<std::size_t>(p));
  out.converged.resize(static_cast<std::size_t>(p));
  out.degenerate.resize(static_cast<std::size_t>(p));

  for (Index i = 0; i < p; ++i) {
    VectorXd y = x.col(i).tail(nobs);
    y.array() -= y.mean();
    const VectorXd xty = design.transpose() * y;
    const double yty = y.squaredNorm();
    const RowFit fit = adaptive_lasso_row(gram, xty, yty, nobs, n, cfg,
                                          fixed_row_lambda ? (*fixed_row_lambda)(i) : -1.0);
    for (Index s = 0; s < d; ++s)
      out.slopes[static_cast<std::size_t>(s)].row(i) = fit.coef.segment(s * p, p).transpose();
    out.stage1.row(i) = fit.stage1.transpose();
    out.lambda(i) = fit.lambda;
    out.bic(i) = fit.bic;
    out.sweeps[static_cast<std::size_t>(i)] = fit.sweeps;
    out.converged[static_cast<std::size_t>(i)] = fit.converged;
    out.degenerate[static_cast<std::size_t>(i)] = fit.degenerate;
  }
  return out;
}

}  // namespace hdsvar
