#pragma once

#include <vector>

#include "hdsvar/types.hpp"

namespace hdsvar {

// ---- VAR(d) structure ------------------------------------------------------
//
// X_t = A_1 X_{t-1} + ... + A_d X_{t-d} + eps_t, with the stacked state
// W_t = (X_t', ..., X_{t-d+1}')' following W_t = C W_{t-1} + L eps_t, where C is
// the dp x dp block-companion matrix and L = e_1 (x) I_p selects the leading block.

// Block-companion matrix of the slope list (all slopes p x p, d >= 1).
MatrixXd companion(const std::vector<MatrixXd>& slopes);

// Selector L = e_1 (x) I_p (dp x p).
MatrixXd companion_selector(Index p, int d);

// Largest eigenvalue modulus (dense eigendecomposition; throws NumericError if the
// eigenvalue iteration fails to converge).
double spectral_radius(const MatrixXd& m);

// Moving-average coefficients Psi_0..Psi_h of the VAR (Psi_0 = I,
// Psi_h = sum_{s=1..min(d,h)} Psi_{h-s} A_s). Each is p x p.
std::vector<MatrixXd> ma_coefficients(const std::vector<MatrixXd>& slopes, int hmax);

// Projection slices Xi_h = L' C^h (p x dp) for h = 0..hmax, built by incremental
// multiplication (Xi_{h+1} = Xi_h C); the leading p x p block of Xi_h equals Psi_h.
std::vector<MatrixXd> ma_slices(const MatrixXd& comp, Index p, int hmax);

// Lagged design rows: row k (k = 0..n-d) is W_{t} for t = d-1+k in 0-based time,
// i.e. (X_{d-1+k}', X_{d-2+k}', ..., X_{k}')'. Shape (n-d+1) x dp.
MatrixXd lag_matrix(const MatrixXd& x, int d);

// One-step-ahead residuals eps_t = X_t - sum_s A_s X_{t-s} for t = d..n-1,
// shape (n-d) x p; columns are mean-centered when `center` is set.
MatrixXd residuals(const MatrixXd& x, const std::vector<MatrixXd>& slopes, bool center = true);

// ---- stacked autocovariance --------------------------------------------------
//
// Gamma(0) = sum_{j>=0} C^j L S L' (C')^j solved by series doubling:
//   S_{2m} = S_m + P_m S_m P_m',  P_{2m} = P_m P_m  (P_1 = C, S_1 = L S L')
// which squares the truncation length every step; stops when the max-norm
// increment falls below `tol`. Never forms the (dp)^2 x (dp)^2 system.
MatrixXd lyapunov_doubling(const MatrixXd& comp, const MatrixXd& q, double tol = 1e-12,
                           int max_doublings = 200);

// Gamma(0) plus what downstream consumers need: SPD solves against Gamma(0) and
// lag products Gamma(h) = C^h Gamma(0) (h >= 0), Gamma(-h) = Gamma(h)'.
class StackedAutocov {
 public:
  // sigma_eps is the p x p innovation covariance plugged into the series.
  StackedAutocov(const MatrixXd& comp, const MatrixXd& sigma_eps, double tol = 1e-12);

  const MatrixXd& gamma0() const { return gamma0_; }
  const MatrixXd& comp() const { return comp_; }
  Index dim() const { return gamma0_.rows(); }

  // Gamma(0)^{-1} b via the cached Cholesky factorization.
  VectorXd solve(const VectorXd& b) const;
  // Gamma(0)^{-1} e_r (one column of the inverse, never the full inverse).
  VectorXd inverse_column(Index r) const;

 private:
  MatrixXd comp_;
  MatrixXd gamma0_;
  Eigen::LLT<MatrixXd> llt_;
};

}  // namespace hdsvar
