#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdsvar/montecarlo.hpp"
#include "hdsvar/pipeline.hpp"

namespace hdsvar {

// Invalid flag values (outside CLI parsing proper). Mapped to exit code 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// Fitted-model artifact: the estimation outputs plus the selected tuning values.
// Inference commands reload the original panel and re-run the pipeline with the
// stored penalties frozen, which reproduces the fit exactly (the run is
// deterministic), then verify the result against the stored matrices.
struct ModelArtifact {
  Index n = 0, p = 0;
  int d = 1;
  bool centered = true;
  std::vector<Index> shock_idx;
  VectorXd row_lambda;  // per-row VAR penalty
  double lambda_b = 0.0;
  double lambda_w = 0.0;
  std::vector<MatrixXd> slopes;      // A^(re)_1..d
  std::vector<MatrixXd> slopes_thr;  // A^(thr)_1..d
  MatrixXd b_tilde;
  MatrixXd b_hat;
  MatrixXd b_hat_re;
  MatrixXd sigma_w;
  MatrixXd sigma_w_re;
};

ModelArtifact make_artifact(const PipelineResult& fit, bool centered);
void save_model(const std::string& path, const ModelArtifact& model);
ModelArtifact load_model(const std::string& path);

// Pipeline configuration that replays a stored fit: penalties frozen, horizon and
// de-sparsified rows as requested (empty = all rows).
PipelineConfig resume_config(const ModelArtifact& model, int horizon,
                             std::vector<Index> debias_rows);

// Re-runs the pipeline on `x` under `cfg` and checks the refit against the stored
// matrices; a mismatch means the panel is not the one the model was fitted on.
PipelineResult resume_fit(const MatrixXd& x, const ModelArtifact& model,
                          const PipelineConfig& cfg);

// ---- subcommands -----------------------------------------------------------
// Each returns a process exit code (0 on success) and throws UsageError /
// DataError / NumericError for the 2/3/4 exit paths handled by the front-end.

struct SimulateArgs {
  std::string preset = "class1";
  Index p = -1, n = -1, k_a = -1, k_u = -1, k_b = -1, k_d = -1;  // -1 = preset value
  int d = -1;
  double rho = -1.0;
  Index shock_of_interest = -1;
  std::string law;  // empty = preset value
  int burn_in = 200;
  std::uint64_t seed = 1;
  std::string out;      // panel CSV (required)
  std::string dgp_out;  // optional generator dump
};
int cmd_simulate(const SimulateArgs& a);

struct FitArgs {
  std::string data;  // panel CSV (required)
  int d = 1;
  std::vector<Index> shocks;  // required, increasing
  bool center = true;
  LassoConfig lasso;
  CovRegConfig covreg;
  std::string out_dir;  // artifact directory (required)
};
int cmd_fit(const FitArgs& a);

struct IrfArgs {
  std::string data;   // panel CSV (required)
  std::string model;  // model.txt from `fit` (required)
  int horizon = 10;
  std::vector<Index> vars;  // response variables; empty = all
  std::string out;          // CSV (required)
};
int cmd_irf(const IrfArgs& a);

struct CiArgs {
  std::string data;
  std::string model;
  int horizon = 10;
  std::vector<Index> vars;    // response variables; empty = all
  Index shock = -1;           // shock column; -1 = all
  std::string method = "boot";  // "boot" | "gaussian"
  std::string center = "de";    // "de" | "re"
  double alpha = 0.05;
  int boot_reps = 500;
  int burn_in = 200;
  bool freeze_tuning = false;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out;  // CSV (required)
};
int cmd_ci(const CiArgs& a);

struct FevdTestArgs {
  std::string data;
  std::string model;
  Index affected = 0;
  Index shock = 0;
  int horizon = 1;
  double delta = 0.0;  // 0 = chi-square variant, (0,1) = one-sided bound test
  double alpha = 0.05;
  std::string out;  // optional single-row CSV
};
int cmd_fevd_test(const FevdTestArgs& a);

struct MontecarloArgs {
  std::string config;  // experiment config file; empty = preset + flags
  std::string preset = "class1";
  int mc_reps = -1;           // -1 = keep config/default
  int boot_reps = -1;
  std::string method;         // "", "boot", "gaussian", "both"
  double alpha = -1.0;
  long long seed = -1;
  int threads = -1;
  std::string trace;
  std::string out;  // report CSV (required)
};
int cmd_montecarlo(const MontecarloArgs& a);

}  // namespace hdsvar
