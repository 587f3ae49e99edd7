#pragma once

#include <vector>

#include "hdsvar/types.hpp"

namespace hdsvar {

// Recursive (Cholesky) identification on the shock-bearing block. The rotation is
// pluggable downstream: every consumer takes the rotation matrix as an input, so a
// caller may substitute its own in place of `cholesky_rotation`'s.
struct CholeskyRotation {
  MatrixXd var_shock;  // Var of the shock-block residuals (k x k)
  MatrixXd chol;       // lower Cholesky factor P, Var = P P'
  MatrixXd rotation;   // R = (P^{-1})', so that R' Var R = I
};

// Raw impact moment B~ = (1/m) sum_t eps_t eps_{t,I}'  (p x k).
MatrixXd estimate_raw_impact(const MatrixXd& resid, const std::vector<Index>& shock_idx);

// Cholesky factorization of the shock-block residual covariance; throws
// NumericError when that covariance is not positive definite.
CholeskyRotation cholesky_rotation(const MatrixXd& resid, const std::vector<Index>& shock_idx);

// Recovered structural shocks u_t = R' eps_{t,I}, one row per residual row (m x k).
MatrixXd structural_shocks(const MatrixXd& resid, const std::vector<Index>& shock_idx,
                           const MatrixXd& rotation);

// Structural impulse responses Theta_h = Psi_h B for h = 0..len(psi)-1.
std::vector<MatrixXd> structural_irf(const std::vector<MatrixXd>& psi, const MatrixXd& b);

}  // namespace hdsvar
