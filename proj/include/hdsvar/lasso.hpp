#pragma once

#include <limits>
#include <vector>

#include "hdsvar/types.hpp"

namespace hdsvar {

struct LassoConfig {
  int grid_size = 40;            // penalty grid length (log-spaced, descending)
  double grid_min_ratio = 1e-2;  // smallest grid value as a fraction of lambda_max
  double tol = 1e-7;             // convergence: max coordinate update per full sweep
  int max_sweeps = 10000;        // total sweep budget per solve
};

// One weighted-lasso solve, working on precomputed Gram data:
//   minimize_c  (1/nobs) ||y - X c||^2 + lambda * sum_s weights_s |c_s|
// with gram = X'X and xty = X'y. `coef` is the warm start and the result.
// Cyclic coordinate descent with active-set inner sweeps; converged means a full
// sweep moved no coordinate by more than cfg.tol AND the stationarity conditions
// hold within 8*cfg.tol on the maintained gradient. Returns sweeps used.
int coordinate_descent_gram(const MatrixXd& gram, const VectorXd& xty, Index nobs,
                            const VectorXd& weights, double lambda, VectorXd& coef,
                            const LassoConfig& cfg, bool* converged);

// Residual sum of squares ||y - Xc||^2 from Gram data (exploits sparsity of c).
double gram_rss(const MatrixXd& gram, const VectorXd& xty, double yty, const VectorXd& coef);

// Largest stationarity violation of `coef`:
//   inactive s:  (|g_s| - lambda w_s)_+        with g = (2/nobs) X'(y - Xc)
//   active s:    |g_s - lambda w_s sign(c_s)|
double kkt_violation(const MatrixXd& gram, const VectorXd& xty, Index nobs,
                     const VectorXd& weights, double lambda, const VectorXd& coef);

struct RowFit {
  VectorXd coef;    // second-stage (adaptively weighted) estimate
  VectorXd stage1;  // first-stage plain-lasso estimate at the same penalty
  double lambda = 0.0;
  double bic = std::numeric_limits<double>::infinity();
  int sweeps = 0;          // total sweeps spent on the whole path
  bool converged = true;   // false if any solve on the path hit the sweep budget
  bool degenerate = false; // response had no usable signal (lambda_max == 0)
};

// Two-stage fit for one response row over a shared penalty grid:
// stage 1 solves the plain lasso at each grid value, stage 2 re-solves with
// weights 1 / (1/sqrt(n_weight) + |stage1_s|), and the grid value minimizing
//   nobs * log(RSS/nobs) + log(nobs) * #nonzero      (second-stage fit)
// is selected; ties go to the sparser (larger) penalty. If fixed_lambda >= 0 the
// grid search is skipped and both stages are solved at that penalty.
RowFit adaptive_lasso_row(const MatrixXd& gram, const VectorXd& xty, double yty, Index nobs,
                          Index n_weight, const LassoConfig& cfg, double fixed_lambda = -1.0);

struct VarFit {
  std::vector<MatrixXd> slopes;  // A_1..A_d
  MatrixXd stage1;               // p x dp first-stage coefficient rows (diagnostics)
  VectorXd lambda;               // selected penalty per row
  VectorXd bic;
  std::vector<int> sweeps;
  std::vector<bool> converged;
  std::vector<bool> degenerate;
};

// Row-by-row adaptive-lasso VAR(d) fit on a panel (columns are mean-centered
// internally; the same lagged design serves every row). fixed_row_lambda, when
// non-null, must have length p and freezes the per-row penalties.
VarFit fit_var(const MatrixXd& x, int d, const LassoConfig& cfg,
               const VectorXd* fixed_row_lambda = nullptr);

}  // namespace hdsvar
