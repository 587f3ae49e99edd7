#include "hdsvar/threshold.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace hdsvar {
namespace {

// Second-moment of resid rows [begin, end) against their shock-index subset.
MatrixXd impact_moment(const MatrixXd& resid, const std::vector<Index>& shock_idx,
                       Index begin, Index end) {
  const Index m = end - begin;
  const auto k = static_cast<Index>(shock_idx.size());
  MatrixXd acc(resid.cols(), k);
  for (Index j = 0; j < k; ++j)
    acc.col(j).noalias() =
        resid.middleRows(begin, m).transpose() * resid.col(shock_idx[j]).segment(begin, m);
  return acc / static_cast<double>(m);
}

// Covariance of eta_t = eps_t - B~ eps_{t,I} over rows [begin, end), symmetrized.
MatrixXd noise_moment(const MatrixXd& eta, Index begin, Index end) {
  const Index m = end - begin;
  MatrixXd acc = MatrixXd::Zero(eta.cols(), eta.cols());
  acc.selfadjointView<Eigen::Lower>().rankUpdate(eta.middleRows(begin, m).transpose());
  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  return acc / static_cast<double>(m);
}

struct FoldSpan {
  Index begin, end;
};

std::vector<FoldSpan> contiguous_folds(Index m, int k) {
  std::vector<FoldSpan> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f)
    folds.push_back({m * f / k, m * (f + 1) / k});
  return folds;
}

// Cross-validated threshold level for a statistic computable on any row span.
// `moment(begin, end)` must return the estimate from rows [begin, end) only;
// train estimates are assembled as the size-weighted complement average.
// keep_diag scores the diagonal-preserving operator used for covariances.
template <typename MomentFn>
double select_threshold(Index m, int folds, int grid_size, double nu, bool keep_diag,
                        MomentFn&& moment) {
  std::vector<MatrixXd> fold_est;
  const auto spans = contiguous_folds(m, folds);
  fold_est.reserve(spans.size());
  for (const auto& s : spans) fold_est.push_back(moment(s.begin, s.end));

  // max |entry| over the full-sample estimate = size-weighted average of folds
  MatrixXd full = MatrixXd::Zero(fold_est[0].rows(), fold_est[0].cols());
  for (std::size_t f = 0; f < spans.size(); ++f)
    full += static_cast<double>(spans[f].end - spans[f].begin) * fold_est[f];
  full /= static_cast<double>(m);
  const double top = full.cwiseAbs().maxCoeff();
  if (top <= 0.0) return 0.0;

  double best_lambda = 0.0;
  double best_score = std::numeric_limits<double>::infinity();
  for (int g = 0; g < grid_size; ++g) {
    const double lambda = top * static_cast<double>(g) / static_cast<double>(grid_size - 1);
    double score = 0.0;
    for (std::size_t f = 0; f < spans.size(); ++f) {
      const double wf = static_cast<double>(spans[f].end - spans[f].begin);
      MatrixXd train = (static_cast<double>(m) * full - wf * fold_est[f]) /
                       (static_cast<double>(m) - wf);
      score += ((keep_diag ? threshold_offdiag(train, lambda, nu)
                           : threshold_matrix(train, lambda, nu)) -
                fold_est[f])
                   .squaredNorm();
    }
    if (score < best_score) {
      best_score = score;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

}  // namespace

double thr(double z, double lambda, double nu) {
  if (lambda < 0.0) throw DataError("threshold level must be non-negative");
  if (!(nu >= 1.0)) throw DataError("threshold exponent must be >= 1");
  const double az = std::abs(z);
  if (az <= lambda) return 0.0;
  if (std::isinf(nu)) return z;  // hard: keep as-is once above the level
  return z * (1.0 - std::pow(lambda / az, nu));
}

MatrixXd threshold_matrix(const MatrixXd& m, double lambda, double nu) {
  MatrixXd out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(i, j) = thr(m(i, j), lambda, nu);
  return out;
}

MatrixXd threshold_offdiag(const MatrixXd& m, double lambda, double nu) {
  MatrixXd out = threshold_matrix(m, lambda, nu);
  out.diagonal() = m.diagonal();
  return out;
}

std::vector<MatrixXd> threshold_slopes(const std::vector<MatrixXd>& slopes,
                                       const VectorXd& row_lambda) {
  if (slopes.empty()) throw DataError("threshold_slopes: empty slope list");
  if (row_lambda.size() != slopes.front().rows())
    throw DataError("threshold_slopes: one penalty per row required");
  std::vector<MatrixXd> out = slopes;
  const double inf = std::numeric_limits<double>::infinity();
  for (auto& a : out)
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) a(i, j) = thr(a(i, j), row_lambda(i), inf);
  return out;
}

CovRegularization regularize_covariances(const MatrixXd& resid,
                                         const std::vector<Index>& shock_idx,
                                         const MatrixXd& b_tilde, const MatrixXd& r_hat,
                                         const CovRegConfig& cfg) {
  const Index m = resid.rows();
  const Index p = resid.cols();
  const auto k = static_cast<Index>(shock_idx.size());
  validate_shock_indices(shock_idx, p);
  if (cfg.folds < 2) throw DataError("cross-validation needs at least 2 folds");
  if (m < 2 * cfg.folds)
    throw DataError("cross-validation needs at least 2 observations per fold (have " +
                    std::to_string(m) + " rows for " + std::to_string(cfg.folds) + " folds)");
  if (cfg.grid_size < 2) throw DataError("threshold grid needs at least 2 points");
  if (b_tilde.rows() != p || b_tilde.cols() != k || r_hat.rows() != k || r_hat.cols() != k)
    throw DataError("regularize_covariances: shape mismatch");

  CovRegularization out;
  out.b_hat = b_tilde * r_hat;

  // eta_t: residual net of its projection on the shock-block residuals,
  // eta_t = eps_t - B^ u^_t with u^_t = R^' eps_{t,I}.  Using the identified
  // shocks (rather than the raw shock-block residuals) keeps the estimate
  // consistent for the noise covariance whatever the shock-block variance is,
  // and zeroes the shock rows of eta exactly.
  MatrixXd eps_shock(m, k);
  for (Index j = 0; j < k; ++j) eps_shock.col(j) = resid.col(shock_idx[j]);
  const MatrixXd eta = resid - (eps_shock * r_hat) * (b_tilde * r_hat).transpose();
  out.sigma_w = noise_moment(eta, 0, m);

  out.lambda_b = cfg.fixed_lambda_b >= 0.0
                     ? cfg.fixed_lambda_b
                     : select_threshold(m, cfg.folds, cfg.grid_size, cfg.nu, false,
                                        [&](Index b, Index e) {
                                          return MatrixXd(impact_moment(resid, shock_idx, b, e) * r_hat);
                                        });
  out.lambda_w = cfg.fixed_lambda_w >= 0.0
                     ? cfg.fixed_lambda_w
                     : select_threshold(m, cfg.folds, cfg.grid_size, cfg.nu, true,
                                        [&](Index b, Index e) { return noise_moment(eta, b, e); });

  out.b_hat_re = threshold_matrix(out.b_hat, out.lambda_b, cfg.nu);
  MatrixXd sw = threshold_offdiag(out.sigma_w, out.lambda_w, cfg.nu);
  out.sigma_w_re = (sw + sw.transpose()) / 2.0;
  out.sigma_eps_re = out.b_hat_re * out.b_hat_re.transpose() + out.sigma_w_re;

  // Off-diagonal thresholding can leave the innovation covariance indefinite;
  // floor its spectrum so downstream solves (stacked autocovariance, plug-in
  // variances) stay well posed.  A positive-definite input passes unchanged.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(out.sigma_eps_re);
  const double floor = 1e-8 * std::max(es.eigenvalues().maxCoeff(), 1e-300);
  if (es.eigenvalues().minCoeff() < floor) {
    std::fprintf(stderr,
                 "warning: regularized innovation covariance floored to PSD "
                 "(min eigenvalue %.3e)\n",
                 es.eigenvalues().minCoeff());
    const VectorXd lifted = es.eigenvalues().cwiseMax(floor);
    out.sigma_eps_re =
        es.eigenvectors() * lifted.asDiagonal() * es.eigenvectors().transpose();
    out.sigma_eps_re = (out.sigma_eps_re + out.sigma_eps_re.transpose()) / 2.0;
  }
  return out;
}

}  // namespace hdsvar
