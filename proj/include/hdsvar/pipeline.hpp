#pragma once

#include <memory>
#include <vector>

#include "hdsvar/debias.hpp"
#include "hdsvar/lasso.hpp"
#include "hdsvar/model.hpp"
#include "hdsvar/structural.hpp"
#include "hdsvar/threshold.hpp"

namespace hdsvar {

// Full estimation sequence on one panel: adaptive-lasso VAR fit, hard-thresholded
// slopes, residuals, recursive identification on the shock block, regularized
// covariances, stacked autocovariance, and de-sparsified MA/IRF rows.
struct PipelineConfig {
  int d = 1;
  int horizon = 10;              // MA/IRF stacks cover h = 0..horizon
  std::vector<Index> shock_idx;  // identified shock block (0-based, increasing)
  LassoConfig lasso;
  CovRegConfig covreg;
  bool center_panel = true;
  std::vector<Index> debias_rows;  // rows to de-sparsify; empty = all rows
  double gamma_tol = 1e-12;
  double dn_tol = 1e-8;
  VectorXd fixed_row_lambda;  // length p freezes the per-row VAR penalties
};

struct PipelineResult {
  Index n = 0, p = 0;
  int d = 1, horizon = 0;
  std::vector<Index> shock_idx;
  VectorXd col_means;  // centering subtracted from the panel (zero when disabled)

  VarFit fit;                          // A^(re) + per-row diagnostics
  std::vector<MatrixXd> slopes_thr;    // A^(thr): rows hard-thresholded at lambda_A
  MatrixXd resid;                      // centered one-step residuals, (n-d) x p
  MatrixXd sigma_eps_sample;           // resid' resid / (n-d)
  MatrixXd b_tilde;                    // raw impact moment, p x k
  CholeskyRotation rot;
  MatrixXd shocks;                     // recovered structural shocks, (n-d) x k
  CovRegularization covreg;            // b_hat, b_hat_re, sigma_w_re, sigma_eps_re

  std::vector<MatrixXd> psi_re;    // MA coefficients of A^(re), h = 0..horizon
  std::vector<MatrixXd> xi_re;     // projection slices L' C^h of A^(re), p x dp
  std::vector<MatrixXd> psi_thr;   // MA coefficients of A^(thr)
  std::vector<MatrixXd> theta_re;  // psi_re[h] * b_hat
  std::vector<MatrixXd> theta_boot;  // psi_thr[h] * b_hat_re (bootstrap centering)

  MatrixXd lagrows;  // lagged state rows of the centered panel, (n-d+1) x dp
  std::shared_ptr<const StackedAutocov> gamma;  // from (A^(thr), sigma_eps_re)
  StateProjections proj;

  std::vector<Index> debias_rows;  // resolved row list, ascending
  std::vector<MatrixXd> psi_de;    // per h: debias_rows.size() x p
  std::vector<MatrixXd> theta_de;  // per h: debias_rows.size() x k

  // Position of row j in the de-sparsified row stack, -1 if untracked.
  Index debias_slot(Index j) const;
  // Context for the MA standard-error estimators (points into this result).
  MaVarianceContext ma_context() const;
};

PipelineResult run_pipeline(const MatrixXd& x, const PipelineConfig& cfg);

}  // namespace hdsvar
