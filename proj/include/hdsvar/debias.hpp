#pragma once

#include <vector>

#include "hdsvar/model.hpp"
#include "hdsvar/structural.hpp"
#include "hdsvar/types.hpp"

namespace hdsvar {

// ---- projection corrections --------------------------------------------------
//
// For each stacked-state coordinate r, beta_r = Gamma(0)^{-1} e_r normalized so
// beta_r' e_r = 1; Z_{t,r} = beta_r' W_t is coordinate r of the state cleaned by
// its best linear prediction from the full state. The de-biased MA estimate adds
// Z-weighted local-projection residuals to the plug-in coefficient.
struct StateProjections {
  MatrixXd beta;    // dp x p (columns r = 0..p-1 only: MA columns live in the lead block)
  MatrixXd zhat;    // (n-d+1) x p, rows aligned with the lag-matrix rows
  MatrixXd dn_cum;  // (n-d+2) x p: dn_cum(k,r) = sum_{i<k} zhat(i,r) * w(i,r)
};

StateProjections state_projections(const StackedAutocov& gamma, const MatrixXd& lagrows,
                                   Index p);

// De-biased MA coefficient row j at horizon h >= 1. `x` must be the same
// (centered) panel the lag matrix was built from; xi_h is the p x dp projection
// slice and psi_h the plug-in MA matrix at horizon h. Throws NumericError when a
// projection denominator degenerates (|DN_r| / n < dn_tol).
VectorXd debias_ma_row(const MatrixXd& x, const MatrixXd& lagrows, int d, int h, Index j,
                       const MatrixXd& xi_h, const MatrixXd& psi_h,
                       const StateProjections& proj, double dn_tol = 1e-8);

// ---- MA-coefficient asymptotic variance ---------------------------------------
struct MaVarianceContext {
  const StackedAutocov* gamma;
  const std::vector<MatrixXd>* psi;  // plug-in MA matrices, horizons 0..H
  MatrixXd sigma_eps;                // innovation-covariance plug-in
  Index n;                           // panel length (finite-sample weight)
  int d;
};

// Asymptotic sd of sqrt(n) (Psi^de_h - Psi_h)_{j,.} v  (h >= 1), including the
// finite-sample weight 1 - (h + d + |t2-t1|)/n on each summand; a negative
// computed variance is clipped to zero (flagged through *clipped).
double ma_se(const MaVarianceContext& ctx, Index j, int h, const VectorXd& v,
             bool* clipped = nullptr);

// Cross-horizon asymptotic covariance of the same quantity at (h1, h2), without
// finite-sample weighting; ma_cov(j,v,h,h) is the unweighted ma_se(j,h,v)^2.
double ma_cov(const MaVarianceContext& ctx, Index j, const VectorXd& v, int h1, int h2);

// ---- impact-matrix asymptotic variance -----------------------------------------

// vech = L vec for symmetric k x k arguments; L is k(k+1)/2 x k^2.
MatrixXd elimination_matrix(Index k);
// K vec(M) = vec(M') for k x k arguments; K is k^2 x k^2.
MatrixXd commutation_matrix(Index k);

// Jacobian of vech(Sigma) -> (P')^{-1} e_r where P = chol(Sigma), lower;
// shape k x k(k+1)/2. Assembled from the Cholesky-factor differential
// vech(dP) = [L (I + K) (P (x) I) L']^{-1} vech(dSigma).
MatrixXd cholesky_jacobian(const MatrixXd& chol_lower, Index r);

// Plug-in asymptotic variance of sqrt(n) v'(B^ - B) e_r: an empirical second
// moment of the per-period influence terms (covariance part + rotation part).
class ImpactVariance {
 public:
  ImpactVariance(const MatrixXd& resid, const MatrixXd& sigma_eps_sample,
                 const MatrixXd& b_tilde, const CholeskyRotation& rot,
                 const std::vector<Index>& shock_idx);

  double se(const VectorXd& v, Index r) const;

  // Pieces reused by the forecast-variance-share test:
  const MatrixXd& jacobian(Index r) const { return jac_[static_cast<std::size_t>(r)]; }
  const MatrixXd& vech_centered() const { return vech_centered_; }  // m x k(k+1)/2
  const MatrixXd& shock_resid() const { return eps_shock_; }        // m x k
  const MatrixXd& b_tilde() const { return b_tilde_; }

 private:
  MatrixXd resid_;
  MatrixXd sigma_eps_;
  MatrixXd b_tilde_;
  MatrixXd rotation_;
  MatrixXd eps_shock_;
  MatrixXd shock_cols_of_sigma_;  // Sigma_eps I_I  (p x k)
  MatrixXd vech_centered_;
  std::vector<MatrixXd> jac_;
};

// ---- combined IRF standard error ----------------------------------------------
//
// sd of sqrt(n) (Theta^de_h - Theta_h)_{j,r}: MA part evaluated at v = B_re e_r
// plus impact part at v = Psi_h' e_j, combined in quadrature; at h = 0 only the
// impact part remains.
double theta_se(const MaVarianceContext& ma_ctx, const ImpactVariance& impact,
                const MatrixXd& b_re, int h, Index j, Index r, bool* clipped = nullptr);

}  // namespace hdsvar
