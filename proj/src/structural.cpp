#include "hdsvar/structural.hpp"

namespace hdsvar {
namespace {

MatrixXd shock_columns(const MatrixXd& resid, const std::vector<Index>& shock_idx) {
  validate_shock_indices(shock_idx, resid.cols());
  MatrixXd sub(resid.rows(), static_cast<Index>(shock_idx.size()));
  for (std::size_t j = 0; j < shock_idx.size(); ++j)
    sub.col(static_cast<Index>(j)) = resid.col(shock_idx[j]);
  return sub;
}

}  // namespace

MatrixXd estimate_raw_impact(const MatrixXd& resid, const std::vector<Index>& shock_idx) {
  if (resid.rows() < 2) throw DataError("estimate_raw_impact: need at least 2 residual rows");
  const MatrixXd sub = shock_columns(resid, shock_idx);
  return (resid.transpose() * sub) / static_cast<double>(resid.rows());
}

CholeskyRotation cholesky_rotation(const MatrixXd& resid, const std::vector<Index>& shock_idx) {
  if (resid.rows() < 2) throw DataError("cholesky_rotation: need at least 2 residual rows");
  const MatrixXd sub = shock_columns(resid, shock_idx);
  CholeskyRotation out;
  out.var_shock = (sub.transpose() * sub) / static_cast<double>(resid.rows());
  out.var_shock = ((out.var_shock + out.var_shock.transpose()) / 2.0).eval();
  Eigen::LLT<MatrixXd> llt(out.var_shock);
  if (llt.info() != Eigen::Success)
    throw NumericError("shock-block residual covariance is not positive definite");
  out.chol = llt.matrixL();
  // R = (P^{-1})' via triangular solve of the identity.
  const auto k = static_cast<Index>(shock_idx.size());
  out.rotation = out.chol.triangularView<Eigen::Lower>()
                     .solve(MatrixXd::Identity(k, k))
                     .transpose();
  return out;
}

MatrixXd structural_shocks(const MatrixXd& resid, const std::vector<Index>& shock_idx,
                           const MatrixXd& rotation) {
  const MatrixXd sub = shock_columns(resid, shock_idx);
  if (rotation.rows() != sub.cols() || rotation.cols() != sub.cols())
    throw DataError("structural_shocks: rotation shape mismatch");
  return sub * rotation;
}

std::vector<MatrixXd> structural_irf(const std::vector<MatrixXd>& psi, const MatrixXd& b) {
  std::vector<MatrixXd> theta;
  theta.reserve(psi.size());
  for (const auto& m : psi) {
    if (m.cols() != b.rows()) throw DataError("structural_irf: shape mismatch");
    theta.emplace_back(m * b);
  }
  return theta;
}

}  // namespace hdsvar
