#include "hdsvar/pipeline.hpp"

#include <algorithm>

namespace hdsvar {

Index PipelineResult::debias_slot(Index j) const {
  const auto it = std::lower_bound(debias_rows.begin(), debias_rows.end(), j);
  if (it == debias_rows.end() || *it != j) return -1;
  return static_cast<Index>(it - debias_rows.begin());
}

MaVarianceContext PipelineResult::ma_context() const {
  MaVarianceContext ctx;
  ctx.gamma = gamma.get();
  ctx.psi = &psi_re;
  ctx.sigma_eps = covreg.sigma_eps_re;
  ctx.n = n;
  ctx.d = d;
  return ctx;
}

PipelineResult run_pipeline(const MatrixXd& x_in, const PipelineConfig& cfg) {
  const Index n = x_in.rows();
  const Index p = x_in.cols();
  if (cfg.d < 1) throw DataError("pipeline: lag order must be >= 1");
  if (cfg.horizon < 0) throw DataError("pipeline: horizon must be >= 0");
  if (n <= cfg.d + 1) throw DataError("pipeline: sample too short for the lag order");
  if (!x_in.allFinite()) throw DataError("pipeline: panel contains non-finite values");
  validate_shock_indices(cfg.shock_idx, p);

  PipelineResult out;
  out.n = n;
  out.p = p;
  out.d = cfg.d;
  out.horizon = cfg.horizon;
  out.shock_idx = cfg.shock_idx;

  MatrixXd x = x_in;
  out.col_means = VectorXd::Zero(p);
  if (cfg.center_panel) {
    out.col_means = x.colwise().mean().transpose();
    x.rowwise() -= out.col_means.transpose();
  }

  // Slope estimation and hard thresholding at the selected row penalties.
  const VectorXd* frozen =
      cfg.fixed_row_lambda.size() > 0 ? &cfg.fixed_row_lambda : nullptr;
  if (frozen && cfg.fixed_row_lambda.size() != p)
    throw DataError("pipeline: fixed_row_lambda must have one entry per variable");
  out.fit = fit_var(x, cfg.d, cfg.lasso, frozen);
  out.slopes_thr = threshold_slopes(out.fit.slopes, out.fit.lambda);

  // Residuals and contemporaneous identification.
  out.resid = residuals(x, out.fit.slopes, true);
  const auto m = static_cast<double>(out.resid.rows());
  out.sigma_eps_sample.noalias() = out.resid.transpose() * out.resid / m;
  out.b_tilde = estimate_raw_impact(out.resid, cfg.shock_idx);
  out.rot = cholesky_rotation(out.resid, cfg.shock_idx);
  out.shocks = structural_shocks(out.resid, cfg.shock_idx, out.rot.rotation);

  // Regularized covariances (threshold levels by CV unless frozen in cfg.covreg).
  out.covreg = regularize_covariances(out.resid, cfg.shock_idx, out.b_tilde,
                                      out.rot.rotation, cfg.covreg);

  // MA stacks and IRFs.
  out.psi_re = ma_coefficients(out.fit.slopes, cfg.horizon);
  out.xi_re = ma_slices(companion(out.fit.slopes), p, cfg.horizon);
  out.psi_thr = ma_coefficients(out.slopes_thr, cfg.horizon);
  out.theta_re = structural_irf(out.psi_re, out.covreg.b_hat);
  out.theta_boot = structural_irf(out.psi_thr, out.covreg.b_hat_re);

  // Stacked autocovariance of the thresholded model with the regularized
  // innovation covariance; diverges (and throws) when A^(thr) is unstable.
  out.gamma = std::make_shared<const StackedAutocov>(companion(out.slopes_thr),
                                                     out.covreg.sigma_eps_re, cfg.gamma_tol);

  // De-sparsified rows.
  out.lagrows = lag_matrix(x, cfg.d);
  out.proj = state_projections(*out.gamma, out.lagrows, p);
  out.debias_rows = cfg.debias_rows;
  if (out.debias_rows.empty()) {
    out.debias_rows.resize(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) out.debias_rows[static_cast<std::size_t>(j)] = j;
  } else {
    std::sort(out.debias_rows.begin(), out.debias_rows.end());
    out.debias_rows.erase(std::unique(out.debias_rows.begin(), out.debias_rows.end()),
                          out.debias_rows.end());
    if (out.debias_rows.front() < 0 || out.debias_rows.back() >= p)
      throw DataError("pipeline: de-sparsified row index out of range");
  }

  const auto rows = static_cast<Index>(out.debias_rows.size());
  const auto k = static_cast<Index>(cfg.shock_idx.size());
  const MatrixXd b_gap = out.covreg.b_hat - out.covreg.b_hat_re;
  out.psi_de.assign(static_cast<std::size_t>(cfg.horizon) + 1, MatrixXd::Zero(rows, p));
  out.theta_de.assign(static_cast<std::size_t>(cfg.horizon) + 1, MatrixXd::Zero(rows, k));
  for (Index s = 0; s < rows; ++s) {
    const Index j = out.debias_rows[static_cast<std::size_t>(s)];
    out.psi_de[0](s, j) = 1.0;  // Psi_0 is known
    out.theta_de[0].row(s) = out.covreg.b_hat.row(j);
    for (int h = 1; h <= cfg.horizon; ++h) {
      const VectorXd row = debias_ma_row(x, out.lagrows, cfg.d, h, j, out.xi_re[h],
                                         out.psi_re[h], out.proj, cfg.dn_tol);
      out.psi_de[static_cast<std::size_t>(h)].row(s) = row.transpose();
      const VectorXd gap = row - out.psi_re[static_cast<std::size_t>(h)].row(j).transpose();
      out.theta_de[static_cast<std::size_t>(h)].row(s) =
          row.transpose() * out.covreg.b_hat - gap.transpose() * b_gap;
    }
  }
  return out;
}

}  // namespace hdsvar
