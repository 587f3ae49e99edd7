#pragma once

#include <vector>

#include "hdsvar/types.hpp"

namespace hdsvar {

// Generalized shrinkage: z * (1 - |lambda/z|^nu)_+ for nu >= 1.
// nu = 1 is soft thresholding, nu = +infinity is hard thresholding.
double thr(double z, double lambda, double nu);

// Elementwise application of `thr`.
MatrixXd threshold_matrix(const MatrixXd& m, double lambda, double nu);

// Covariance variant: off-diagonal entries are thresholded, the diagonal is kept.
// Variances are not sparse, and a zeroed variance would make the implied
// innovation covariance singular (degenerate simulated worlds downstream).
MatrixXd threshold_offdiag(const MatrixXd& m, double lambda, double nu);

// Hard-thresholds each slope row at that row's own penalty (the selected lasso
// penalty is reused as the truncation level).
std::vector<MatrixXd> threshold_slopes(const std::vector<MatrixXd>& slopes,
                                       const VectorXd& row_lambda);

struct CovRegConfig {
  int folds = 5;        // contiguous time folds for the threshold cross-validation
  int grid_size = 30;   // linear grid on [0, max |entry|], always includes 0
  double nu = 1.0;      // soft thresholding by default
  double fixed_lambda_b = -1.0;  // >= 0 freezes the impact-matrix threshold
  double fixed_lambda_w = -1.0;  // >= 0 freezes the noise-covariance threshold
};

struct CovRegularization {
  MatrixXd b_hat;         // rotated impact estimate B~ R^ (unthresholded)
  MatrixXd sigma_w;       // unthresholded noise covariance (symmetrized)
  MatrixXd b_hat_re;      // thresholded impact matrix
  MatrixXd sigma_w_re;    // thresholded, symmetrized noise covariance
  MatrixXd sigma_eps_re;  // b_hat_re b_hat_re' + sigma_w_re
  double lambda_b = 0.0;
  double lambda_w = 0.0;
};

// Threshold levels are chosen by K-fold cross-validation on contiguous time
// folds: for each candidate level, the estimate rebuilt from the other folds is
// thresholded and scored by squared Frobenius distance to the unthresholded
// estimate on the held-out fold; the level minimizing the average score wins
// (ties to the smaller level). Thresholding is then applied to the full-sample
// estimates. `resid` are the (centered) one-step residuals, `b_tilde` the raw
// impact moment, `r_hat` the identification rotation.
CovRegularization regularize_covariances(const MatrixXd& resid,
                                         const std::vector<Index>& shock_idx,
                                         const MatrixXd& b_tilde, const MatrixXd& r_hat,
                                         const CovRegConfig& cfg);

}  // namespace hdsvar
