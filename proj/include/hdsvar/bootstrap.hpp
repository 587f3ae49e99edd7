#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdsvar/pipeline.hpp"
#include "hdsvar/rng.hpp"

namespace hdsvar {

struct BootstrapConfig {
  int reps = 500;
  int burn_in = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  bool freeze_tuning = false;       // reuse the original penalties and thresholds
  double max_failure_share = 0.05;  // abort when more replicates fail
  std::string dump_path;            // optional replicate CSV (replicate,h,j,r,value)
};

struct BootTarget {
  int h = 0;
  Index j = 0;  // response variable
  Index r = 0;  // shock column
};

struct BootstrapDistribution {
  std::vector<BootTarget> targets;
  VectorXd centers;  // theta_boot per target (thresholded-model IRF)
  MatrixXd draws;    // successful replicates x targets: sqrt(n) (theta*_de - center)
  int requested = 0;
  int failed = 0;
  std::vector<std::string> failure_reasons;  // first few messages

  // Type-7 empirical quantile of one target column.
  double quantile(Index target, double q) const;
};

// Pseudo-innovation generator: eps* = B^(re) u* + w*, where u* is resampled from
// the recentered shock pool and w* is Gaussian with the (PSD-clipped) regularized
// noise covariance.
class PseudoInnovations {
 public:
  PseudoInnovations(const MatrixXd& shock_pool, const MatrixXd& b_re,
                    const MatrixXd& sigma_w_re);

  // `count` pseudo innovations, one per row.
  MatrixXd draw(Index count, Rng& rng) const;

  bool clipped() const { return clipped_; }
  const MatrixXd& noise_root() const { return root_; }

 private:
  MatrixXd pool_;  // recentered structural shocks, m x k
  MatrixXd b_re_;  // p x k
  MatrixXd root_;  // p x p PSD square root of sigma_w_re
  bool clipped_ = false;
};

// Simulates X*_t = sum_s A_s X*_{t-s} + eps*_t from zero starting values and
// drops the first `burn_in` points. When `check_stability` is set the companion
// spectral radius is verified to be < 1 (callers running many replicates check
// once and pass false).
MatrixXd pseudo_series(const std::vector<MatrixXd>& slopes, const PseudoInnovations& gen,
                       Index n, int burn_in, Rng& rng, bool check_stability = true);

// Residual-resampling bootstrap of the de-sparsified structural IRF: per
// replicate, regenerate a pseudo panel from the thresholded model and rerun the
// full estimation pipeline, recording sqrt(n) (theta*_de - theta_boot) per
// target. Failed replicates are skipped and counted; more than
// `max_failure_share` failures aborts. Replicate b draws from the RNG stream
// derived as child(b) of the master seed, so results do not depend on the
// worker count.
BootstrapDistribution bootstrap_irf(const PipelineResult& fit, const PipelineConfig& cfg,
                                    const std::vector<BootTarget>& targets,
                                    const BootstrapConfig& bcfg);

}  // namespace hdsvar
