#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdsvar/bootstrap.hpp"
#include "hdsvar/dgp.hpp"
#include "hdsvar/pipeline.hpp"

namespace hdsvar {

// Coverage experiment: per replicate draw a fresh random model, simulate a panel,
// run the full estimation pipeline, build confidence intervals for the responses
// of the tracked variables to the shock of interest, and record coverage of the
// true coefficients plus interval lengths.
struct ExperimentConfig {
  DgpSpec dgp;
  int mc_reps = 200;
  std::vector<int> horizons;  // empty = 0..20
  bool run_boot = true;
  bool run_gaussian = true;
  double alpha = 0.05;
  BootstrapConfig boot;    // reps/burn_in/freeze_tuning/threads (inner level)
  int sim_burn_in = 200;   // pre-sample discarded when simulating panels
  Index track_limit = 20;  // track variables 0..min(p, track_limit)-1
  int threads = 1;         // replicate-level workers
  std::uint64_t seed = 1;
  std::string trace_path;  // optional per-replicate status dump
  LassoConfig lasso;
  CovRegConfig covreg;

  void validate() const;
  std::vector<int> horizon_list() const;
  std::vector<Index> tracked_vars() const;
};

// One aggregated cell. Bands partition the tracked variables around the variable
// carrying the shock of interest: "below" (indices before it), "shock" (itself),
// "above" (after it). n_ok counts aggregated interval instances (successful
// replicates x band size); n_fail the instances lost to failed replicates.
struct ExperimentCell {
  std::string method;  // "boot" | "gaussian"
  std::string center;  // "de" | "re"
  int horizon{};
  std::string band;  // "below" | "shock" | "above"
  double coverage{};
  double length{};
  int n_ok{};
  int n_fail{};
};

struct ExperimentReport {
  std::vector<ExperimentCell> cells;  // fixed order: method, center, horizon, band
  int replicates_ok = 0;
  int replicates_failed = 0;
  double wall_seconds = 0.0;  // not serialized (reports must be byte-stable)
  std::vector<std::string> failure_reasons;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// CSV with header method,centering,horizon,band,coverage,length,n_ok,n_fail.
void emit_report(const ExperimentReport& report, const std::string& path);
// Re-ingests an emitted CSV (cells only).
ExperimentReport read_report(const std::string& path);

// Line-oriented "hdsvar-mc v1" config file mirroring the CLI options; `preset`
// selects a DGP preset, remaining keys override individual fields.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace hdsvar
