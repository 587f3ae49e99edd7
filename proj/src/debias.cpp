#include "hdsvar/debias.hpp"

#include <cmath>
#include <cstdio>

namespace hdsvar {

StateProjections state_projections(const StackedAutocov& gamma, const MatrixXd& lagrows,
                                   Index p) {
  const Index dp = gamma.dim();
  if (lagrows.cols() != dp) throw DataError("state_projections: lag matrix width != dp");
  if (p > dp) throw DataError("state_projections: p exceeds state dimension");
  StateProjections out;
  out.beta.resize(dp, p);
  for (Index r = 0; r < p; ++r) {
    VectorXd col = gamma.inverse_column(r);
    const double diag = col(r);  // e_r' Gamma^{-1} e_r
    if (!(diag > 0.0))
      throw NumericError("state projection " + std::to_string(r) +
                         ": non-positive inverse diagonal");
    out.beta.col(r) = col / diag;
  }
  out.zhat.noalias() = lagrows * out.beta;
  const Index rows = lagrows.rows();
  out.dn_cum = MatrixXd::Zero(rows + 1, p);
  for (Index k = 0; k < rows; ++k)
    out.dn_cum.row(k + 1) =
        out.dn_cum.row(k) + out.zhat.row(k).cwiseProduct(lagrows.row(k).head(p));
  return out;
}

VectorXd debias_ma_row(const MatrixXd& x, const MatrixXd& lagrows, int d, int h, Index j,
                       const MatrixXd& xi_h, const MatrixXd& psi_h,
                       const StateProjections& proj, double dn_tol) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (h < 1) throw DataError("debias_ma_row: horizon must be >= 1");
  if (j < 0 || j >= p) throw DataError("debias_ma_row: row index out of range");
  const Index window = lagrows.rows() - h;  // observations t = d-1 .. n-1-h (0-based)
  if (window - 1 < 10)
    throw DataError("debias_ma_row: usable window too short (need n - h - d >= 10)");

  // Local-projection residuals X_{t+h,j} - Xi_h(j,.) W_t over the window.
  VectorXd res = x.col(j).segment(d - 1 + h, window);
  res.noalias() -= lagrows.topRows(window) * xi_h.row(j).transpose();

  VectorXd corr(p);
  corr.noalias() = proj.zhat.topRows(window).transpose() * res;

  VectorXd out(p);
  for (Index r = 0; r < p; ++r) {
    const double dn = proj.dn_cum(window, r);
    if (std::abs(dn) / static_cast<double>(n) < dn_tol)
      throw NumericError("debias_ma_row: degenerate projection denominator at column " +
                         std::to_string(r));
    out(r) = psi_h(j, r) + corr(r) / dn;
  }
  return out;
}

namespace {

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// a(tau) = y' Gamma(tau) y for tau = 0..taumax, with y = Gamma(0)^{-1} L v.
// Gamma(tau) = C^tau Gamma(0) and a(-tau) = a(tau) because both sides carry the
// same vector.
std::vector<double> gamma_quadratics(const StackedAutocov& gamma, const VectorXd& v,
                                     int taumax) {
  const Index dp = gamma.dim();
  if (v.size() > dp) throw DataError("gamma_quadratics: v longer than state dimension");
  VectorXd lv = VectorXd::Zero(dp);
  lv.head(v.size()) = v;
  const VectorXd y = gamma.solve(lv);
  const VectorXd g0y = gamma.gamma0() * y;
  std::vector<double> a(static_cast<std::size_t>(taumax) + 1);
  VectorXd z = y;
  a[0] = y.dot(g0y);
  for (int tau = 1; tau <= taumax; ++tau) {
    z = gamma.comp().transpose() * z;  // z = (C')^tau y
    a[static_cast<std::size_t>(tau)] = z.dot(g0y);
  }
  return a;
}

// m(t1, t2) = e_j' Psi_{t1} Sigma Psi_{t2}' e_j for t1, t2 < hmax.
MatrixXd ma_inner_products(const std::vector<MatrixXd>& psi, const MatrixXd& sigma, Index j,
                           int hmax) {
  if (static_cast<int>(psi.size()) < hmax)
    throw DataError("ma variance: not enough MA matrices for the horizon");
  MatrixXd u(sigma.rows(), hmax);
  for (int t = 0; t < hmax; ++t) u.col(t) = psi[static_cast<std::size_t>(t)].row(j).transpose();
  const MatrixXd su = sigma * u;
  return u.transpose() * su;  // hmax x hmax, symmetric
}

}  // namespace

double ma_se(const MaVarianceContext& ctx, Index j, int h, const VectorXd& v, bool* clipped) {
  if (h < 1) throw DataError("ma_se: horizon must be >= 1");
  const auto a = gamma_quadratics(*ctx.gamma, v, h - 1);
  const MatrixXd m = ma_inner_products(*ctx.psi, ctx.sigma_eps, j, h);
  const auto n = static_cast<double>(ctx.n);
  double var = 0.0;
  for (int t1 = 0; t1 < h; ++t1)
    for (int t2 = 0; t2 < h; ++t2) {
      const int lag = std::abs(t2 - t1);
      const double weight = 1.0 - (static_cast<double>(h + ctx.d + lag)) / n;
      var += weight * m(t1, t2) * a[static_cast<std::size_t>(lag)];
    }
  if (clipped) *clipped = false;
  if (var < 0.0) {
    if (clipped) *clipped = true;
    std::fprintf(stderr, "warning: MA variance clipped to zero (j=%ld h=%d, value %.3e)\n",
                 static_cast<long>(j), h, var);
    var = 0.0;
  }
  return std::sqrt(var);
}

double ma_cov(const MaVarianceContext& ctx, Index j, const VectorXd& v, int h1, int h2) {
  if (h1 < 1 || h2 < 1) throw DataError("ma_cov: horizons must be >= 1");
  const int taumax = std::abs(h2 - h1) + std::max(h1, h2);  // covers |h2-h1+t2-t1|
  const auto a = gamma_quadratics(*ctx.gamma, v, taumax);
  const MatrixXd m = ma_inner_products(*ctx.psi, ctx.sigma_eps, j, std::max(h1, h2));
  double cov = 0.0;
  for (int t1 = 0; t1 < h1; ++t1)
    for (int t2 = 0; t2 < h2; ++t2)
      cov += m(t1, t2) * a[static_cast<std::size_t>(std::abs(h2 - h1 + t2 - t1))];
  return cov;
}

MatrixXd elimination_matrix(Index k) {
  const Index m = k * (k + 1) / 2;
  MatrixXd l = MatrixXd::Zero(m, k * k);
  Index row = 0;
  for (Index j = 0; j < k; ++j)
    for (Index i = j; i < k; ++i) l(row++, j * k + i) = 1.0;
  return l;
}

MatrixXd commutation_matrix(Index k) {
  MatrixXd c = MatrixXd::Zero(k * k, k * k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) c(i * k + j, j * k + i) = 1.0;
  return c;
}

MatrixXd cholesky_jacobian(const MatrixXd& chol_lower, Index r) {
  const Index k = chol_lower.rows();
  if (chol_lower.cols() != k) throw DataError("cholesky_jacobian: factor must be square");
  if (r < 0 || r >= k) throw DataError("cholesky_jacobian: column out of range");
  const MatrixXd l = elimination_matrix(k);
  const MatrixXd kom = commutation_matrix(k);
  const MatrixXd eye = MatrixXd::Identity(k, k);

  // vech(dP) = F^{-1} vech(dSigma) with F = L (I + K) (P (x) I) L'.
  const MatrixXd f =
      l * (MatrixXd::Identity(k * k, k * k) + kom) * kron(chol_lower, eye) * l.transpose();
  const MatrixXd finv = f.partialPivLu().solve(MatrixXd::Identity(f.rows(), f.cols()));

  // d[(P')^{-1} e_r] = -(q' (x) P^{-T}) K vec(dP), q = P^{-T} e_r.
  const MatrixXd pinv_t =
      chol_lower.triangularView<Eigen::Lower>().solve(eye).transpose();  // P^{-T}
  const VectorXd q = pinv_t.col(r);
  const MatrixXd front = kron(q.transpose(), pinv_t);
  return -front * kom * l.transpose() * finv;
}

ImpactVariance::ImpactVariance(const MatrixXd& resid, const MatrixXd& sigma_eps_sample,
                               const MatrixXd& b_tilde, const CholeskyRotation& rot,
                               const std::vector<Index>& shock_idx)
    : resid_(resid), sigma_eps_(sigma_eps_sample), b_tilde_(b_tilde), rotation_(rot.rotation) {
  const Index m = resid.rows();
  const Index p = resid.cols();
  const auto k = static_cast<Index>(shock_idx.size());
  validate_shock_indices(shock_idx, p);
  if (b_tilde.rows() != p || b_tilde.cols() != k)
    throw DataError("ImpactVariance: raw impact shape mismatch");

  eps_shock_.resize(m, k);
  for (Index j = 0; j < k; ++j) eps_shock_.col(j) = resid.col(shock_idx[j]);

  shock_cols_of_sigma_.resize(p, k);
  for (Index j = 0; j < k; ++j) shock_cols_of_sigma_.col(j) = sigma_eps_sample.col(shock_idx[j]);

  const Index vdim = k * (k + 1) / 2;
  vech_centered_.resize(m, vdim);
  for (Index t = 0; t < m; ++t) {
    Index pos = 0;
    for (Index j = 0; j < k; ++j)
      for (Index i = j; i < k; ++i) vech_centered_(t, pos++) = eps_shock_(t, i) * eps_shock_(t, j);
  }
  vech_centered_.rowwise() -= vech_centered_.colwise().mean();

  jac_.reserve(static_cast<std::size_t>(k));
  for (Index r = 0; r < k; ++r) jac_.push_back(cholesky_jacobian(rot.chol, r));
}

double ImpactVariance::se(const VectorXd& v, Index r) const {
  const Index m = resid_.rows();
  if (v.size() != resid_.cols()) throw DataError("ImpactVariance::se: v has wrong length");
  if (r < 0 || r >= eps_shock_.cols()) throw DataError("ImpactVariance::se: shock out of range");

  const VectorXd a = resid_ * v;                              // v' eps_t
  const VectorXd b = eps_shock_ * rotation_.col(r);           // eps_{t,I}' R e_r
  const double center = v.dot(shock_cols_of_sigma_ * rotation_.col(r));
  const VectorXd w = jac_[static_cast<std::size_t>(r)].transpose() * (b_tilde_.transpose() * v);
  const VectorXd rot_part = vech_centered_ * w;

  double acc = 0.0;
  for (Index t = 0; t < m; ++t) {
    const double infl = a(t) * b(t) - center + rot_part(t);
    acc += infl * infl;
  }
  return std::sqrt(acc / static_cast<double>(m));
}

double theta_se(const MaVarianceContext& ma_ctx, const ImpactVariance& impact,
                const MatrixXd& b_re, int h, Index j, Index r, bool* clipped) {
  if (h == 0) {
    VectorXd ej = VectorXd::Zero(b_re.rows());
    ej(j) = 1.0;
    if (clipped) *clipped = false;
    return impact.se(ej, r);
  }
  const double se_ma = ma_se(ma_ctx, j, h, b_re.col(r), clipped);
  const VectorXd v = (*ma_ctx.psi)[static_cast<std::size_t>(h)].row(j).transpose();
  const double se_b = impact.se(v, r);
  return std::sqrt(se_ma * se_ma + se_b * se_b);
}

}  // namespace hdsvar
