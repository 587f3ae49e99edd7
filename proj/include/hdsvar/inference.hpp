#pragma once

#include <string>
#include <vector>

#include "hdsvar/bootstrap.hpp"
#include "hdsvar/debias.hpp"
#include "hdsvar/pipeline.hpp"
#include "hdsvar/types.hpp"

namespace hdsvar {

struct ConfidenceInterval {
  double lower{};
  double upper{};
  double level{};       // 1 - alpha
  std::string method;   // "boot" | "gaussian"
  std::string center;   // "de" | "re"
  BootTarget target{};
};

// Quantile interval from the sqrt(n)-scaled replicate draws in `dist`, anchored at
// `center_value`: [c - q(1-a/2)/sqrt(n), c - q(a/2)/sqrt(n)]. The interval length
// does not depend on the anchor.
ConfidenceInterval ci_boot(const BootstrapDistribution& dist, Index target_index,
                           double center_value, const std::string& center_kind, Index n,
                           double alpha);

// Normal-approximation interval: center +- se * q(1-a/2) / sqrt(n). The center is
// the regularized estimate by default; the de-sparsified analogue shifts the same
// half-width onto the other center.
ConfidenceInterval ci_gaussian(double center_value, double se_theta, Index n, double alpha,
                               const BootTarget& target, const std::string& center_kind = "re");

struct FevdEstimate {
  Index i{};  // affected variable
  Index j{};  // shock
  int h{};    // horizon >= 1
  double numerator{};
  double denominator{};
  double w{};
};

// Share of variable i's h-step forecast-error variance attributed to shock j:
// sum_k theta_{k;ij}^2 over sum_k e_i' Psi_k Sigma_eps Psi_k' e_i, k = 0..h-1.
// The denominator uses the unregularized sample residual covariance.
FevdEstimate fevd(const std::vector<MatrixXd>& theta, const std::vector<MatrixXd>& psi,
                  const MatrixXd& sigma_eps_sample, Index i, Index j, int h);

struct FevdTestResult {
  double statistic{};
  double critical{};
  double p_value{};
  bool reject{};
  std::string variant;    // "zero" | "delta"
  double delta{};         // tested bound (0 for the chi^2 variant)
  double sigma_scalar{};  // delta-method sd for the delta variant, 0 otherwise
  MatrixXd sigma_t;       // h x h covariance used (after any ridge repair)
  double jitter{};        // ridge added to make sigma_t factorizable (0 if none)
};

// h x h covariance of sqrt(n)(theta^de_{0..h-1; i,j} - theta): cross-horizon MA
// covariance evaluated at v = B^re e_j, plus the horizon-h impact variance as a
// constant term on every cell. Cells with a zero-length MA sum carry only the
// constant.
MatrixXd fevd_sigma_t(const PipelineResult& fit, const ImpactVariance& impact, Index i,
                      Index j, int h);

// De-sparsified response path (theta^de_{k; i,j})_{k=0..h-1}; variable i must be
// tracked by the fit's de-biasing rows.
VectorXd theta_de_path(const PipelineResult& fit, Index i, Index j, int h);

// chi^2_h test of H0: w_{i,j}^h = 0 via the quadratic form theta' SigmaT^{-1} theta.
// A non-factorizable SigmaT is ridge-repaired once with jitter 1e-10 * trace / h
// (logged); statistic > chi^2 quantile / n rejects.
FevdTestResult fevd_test_zero(const VectorXd& theta_de, const MatrixXd& sigma_t, Index n,
                              double alpha);

// Covariance between the estimated h-step forecast-error variance and each
// de-sparsified response (length h): a model-implied triple sum plus the
// empirical fourth-moment covariance of per-period influence terms.
VectorXd fevd_kappa(const PipelineResult& fit, const ImpactVariance& impact, Index i,
                    Index j, int h);

// h-step forecast-error series e_i'(X_{t+h} - Xi_h W_t) over the aligned window
// (length = lag rows - h).
VectorXd forecast_error_series(const PipelineResult& fit, Index i, int h);

// Lag-window long-run variance of the squared forecast errors:
// sum_{k<h} autocov_k(u^2) * (1 + 1(k>0)).
double fevd_f_u2(const VectorXd& u, int h);

// One-sided delta-method test of H0: w_{i,j}^h <= delta for delta > 0. The
// statistic is sum_k (theta^de)^2 / Var(u); rejection when it exceeds
// delta + q(1-alpha) * sigma / sqrt(n).
FevdTestResult fevd_test_delta(const PipelineResult& fit, const ImpactVariance& impact,
                               Index i, Index j, int h, double delta, double alpha);

struct FevdEdge {
  Index i{};
  Index j{};
  int h{};
  double w{};
  double stat{};
  double p_value{};  // BH-adjusted for the test rule, NaN for the threshold rule
  bool edge{};
};

// Edge i -> j iff w > tau.
std::vector<FevdEdge> fevd_network_threshold(const std::vector<FevdEstimate>& grid,
                                             double tau);

// Edge iff the BH-adjusted p-value of the paired test is <= q.
std::vector<FevdEdge> fevd_network_bh(const std::vector<FevdEstimate>& grid,
                                      const std::vector<FevdTestResult>& tests, double q);

// CSV: header i,j,h,w_hat,stat,p_value,edge. Edge list: "i j weight" for edges only.
void write_fevd_csv(const std::string& path, const std::vector<FevdEdge>& rows);
void write_edge_list(const std::string& path, const std::vector<FevdEdge>& rows);

}  // namespace hdsvar
