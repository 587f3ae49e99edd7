#include "hdsvar/model.hpp"

#include <Eigen/Eigenvalues>

#include <string>

namespace hdsvar {
namespace {

void check_slopes(const std::vector<MatrixXd>& slopes) {
  if (slopes.empty()) throw DataError("slope list is empty");
  const Index p = slopes.front().rows();
  for (const auto& a : slopes)
    if (a.rows() != p || a.cols() != p)
      throw DataError("slope matrices must all be square with matching size");
}

}  // namespace

MatrixXd companion(const std::vector<MatrixXd>& slopes) {
  check_slopes(slopes);
  const Index p = slopes.front().rows();
  const auto d = static_cast<Index>(slopes.size());
  MatrixXd c = MatrixXd::Zero(d * p, d * p);
  for (Index s = 0; s < d; ++s) c.block(0, s * p, p, p) = slopes[static_cast<std::size_t>(s)];
  if (d > 1) c.block(p, 0, (d - 1) * p, (d - 1) * p).setIdentity();
  return c;
}

MatrixXd companion_selector(Index p, int d) {
  MatrixXd l = MatrixXd::Zero(static_cast<Index>(d) * p, p);
  l.topRows(p).setIdentity();
  return l;
}

double spectral_radius(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw DataError("spectral radius of a non-square matrix");
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw NumericError("eigenvalue iteration did not converge (size " +
                       std::to_string(m.rows()) + ")");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<MatrixXd> ma_coefficients(const std::vector<MatrixXd>& slopes, int hmax) {
  check_slopes(slopes);
  if (hmax < 0) throw DataError("ma_coefficients: negative horizon");
  const Index p = slopes.front().rows();
  const int d = static_cast<int>(slopes.size());
  std::vector<MatrixXd> psi;
  psi.reserve(static_cast<std::size_t>(hmax) + 1);
  psi.push_back(MatrixXd::Identity(p, p));
  for (int h = 1; h <= hmax; ++h) {
    MatrixXd m = MatrixXd::Zero(p, p);
    for (int s = 1; s <= std::min(d, h); ++s)
      m.noalias() += psi[static_cast<std::size_t>(h - s)] * slopes[static_cast<std::size_t>(s - 1)];
    psi.push_back(std::move(m));
  }
  return psi;
}

std::vector<MatrixXd> ma_slices(const MatrixXd& comp, Index p, int hmax) {
  if (comp.rows() != comp.cols() || comp.rows() % p != 0)
    throw DataError("ma_slices: companion size is not a multiple of p");
  if (hmax < 0) throw DataError("ma_slices: negative horizon");
  const Index dp = comp.rows();
  std::vector<MatrixXd> xi;
  xi.reserve(static_cast<std::size_t>(hmax) + 1);
  MatrixXd cur = MatrixXd::Zero(p, dp);
  cur.leftCols(p).setIdentity();
  xi.push_back(cur);
  for (int h = 1; h <= hmax; ++h) {
    MatrixXd next(p, dp);
    next.noalias() = cur * comp;
    xi.push_back(next);
    cur.swap(next);
  }
  return xi;
}

MatrixXd lag_matrix(const MatrixXd& x, int d) {
  const Index n = x.rows(), p = x.cols();
  if (d < 1) throw DataError("lag order must be >= 1");
  if (n <= d) throw DataError("need more than d observations to build lags");
  const Index rows = n - d + 1;
  MatrixXd w(rows, static_cast<Index>(d) * p);
  for (Index k = 0; k < rows; ++k)
    for (Index s = 0; s < d; ++s) w.block(k, s * p, 1, p) = x.row(d - 1 + k - s);
  return w;
}

MatrixXd residuals(const MatrixXd& x, const std::vector<MatrixXd>& slopes, bool center) {
  check_slopes(slopes);
  const Index n = x.rows(), p = x.cols();
  const int d = static_cast<int>(slopes.size());
  if (x.cols() != slopes.front().rows()) throw DataError("panel width does not match slopes");
  if (n <= d) throw DataError("need more than d observations to compute residuals");
  MatrixXd eps = x.bottomRows(n - d);
  for (int s = 1; s <= d; ++s)
    eps.noalias() -= x.middleRows(d - s, n - d) * slopes[static_cast<std::size_t>(s - 1)].transpose();
  if (center) eps.rowwise() -= eps.colwise().mean();
  return eps;
}

MatrixXd lyapunov_doubling(const MatrixXd& comp, const MatrixXd& q, double tol,
                           int max_doublings) {
  if (comp.rows() != comp.cols() || q.rows() != q.cols() || comp.rows() != q.rows())
    throw DataError("lyapunov_doubling: dimension mismatch");
  MatrixXd s = q;
  MatrixXd pwr = comp;
  MatrixXd increment(s.rows(), s.cols());
  for (int it = 0; it < max_doublings; ++it) {
    increment.noalias() = pwr * s * pwr.transpose();
    const double delta = increment.cwiseAbs().maxCoeff();
    s += increment;
    if (!s.allFinite())
      throw NumericError("lyapunov series diverged (companion spectral radius >= 1?)");
    if (delta < tol) return s;
    pwr = (pwr * pwr).eval();
  }
  throw NumericError("lyapunov series did not converge within " +
                     std::to_string(max_doublings) + " doublings");
}

StackedAutocov::StackedAutocov(const MatrixXd& comp, const MatrixXd& sigma_eps, double tol)
    : comp_(comp) {
  const Index dp = comp.rows();
  const Index p = sigma_eps.rows();
  if (sigma_eps.rows() != sigma_eps.cols() || dp % p != 0)
    throw DataError("StackedAutocov: dimension mismatch between companion and innovation covariance");
  MatrixXd q = MatrixXd::Zero(dp, dp);
  q.topLeftCorner(p, p) = sigma_eps;
  gamma0_ = lyapunov_doubling(comp, q, tol);
  // Exact symmetry helps the Cholesky; the series is symmetric in exact arithmetic.
  gamma0_ = ((gamma0_ + gamma0_.transpose()) / 2.0).eval();
  llt_.compute(gamma0_);
  if (llt_.info() != Eigen::Success)
    throw NumericError("stacked autocovariance is not positive definite");
}

VectorXd StackedAutocov::solve(const VectorXd& b) const {
  if (b.size() != gamma0_.rows()) throw DataError("StackedAutocov::solve: size mismatch");
  return llt_.solve(b);
}

VectorXd StackedAutocov::inverse_column(Index r) const {
  if (r < 0 || r >= gamma0_.rows()) throw DataError("StackedAutocov::inverse_column: index out of range");
  VectorXd e = VectorXd::Zero(gamma0_.rows());
  e(r) = 1.0;
  return llt_.solve(e);
}

}  // namespace hdsvar
