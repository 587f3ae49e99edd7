#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdsvar/dgp.hpp"
#include "hdsvar/pipeline.hpp"

using namespace hdsvar;

namespace {

struct Fixture {
  DgpSpec spec;
  GeneratedDgp dgp;
  TimeSeriesPanel panel;
  PipelineConfig cfg;
  PipelineResult fit;
};

const Fixture& fixture() {
  static const Fixture fx = [] {
    Fixture out;
    out.spec.p = 8;
    out.spec.n = 160;
    out.spec.d = 2;
    out.spec.k_a = 3;
    out.spec.k_u = 3;
    out.spec.k_b = 4;
    out.spec.k_d = 4;
    out.spec.shock_of_interest = 1;
    out.dgp = generate_dgp(out.spec, 2301);
    Rng rng(2302);
    out.panel = simulate(out.dgp, out.spec.n, 200, out.spec.law, rng);
    out.cfg.d = 2;
    out.cfg.horizon = 5;
    out.cfg.shock_idx = out.spec.shocks();
    out.cfg.lasso.grid_size = 15;
    out.cfg.lasso.grid_min_ratio = 0.05;
    out.cfg.debias_rows = {0, 1, 4};
    out.fit = run_pipeline(out.panel.x, out.cfg);
    return out;
  }();
  return fx;
}

}  // namespace

TEST_CASE("the pipeline result is internally consistent") {
  const Fixture& fx = fixture();
  const PipelineResult& fit = fx.fit;
  const Index p = 8, k = 3;
  CHECK(fit.n == 160);
  CHECK(fit.p == p);
  CHECK(fit.d == 2);
  CHECK(fit.horizon == 5);
  REQUIRE(fit.fit.slopes.size() == 2);
  REQUIRE(fit.psi_re.size() == 6);
  REQUIRE(fit.theta_de.size() == 6);

  // Centered residuals and their sample covariance.
  CHECK(fit.resid.rows() == 158);
  CHECK(fit.resid.colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
  const MatrixXd direct = fit.resid.transpose() * fit.resid / 158.0;
  CHECK((fit.sigma_eps_sample - direct).cwiseAbs().maxCoeff() < 1e-12);

  // Identified shocks are exactly whitened in sample.
  const MatrixXd var_u = fit.shocks.transpose() * fit.shocks / 158.0;
  CHECK((var_u - MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);

  // Response stacks compose their parts.
  for (int h = 0; h <= 5; ++h) {
    const auto hs = static_cast<std::size_t>(h);
    CHECK((fit.theta_re[hs] - fit.psi_re[hs] * fit.covreg.b_hat).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((fit.theta_boot[hs] - fit.psi_thr[hs] * fit.covreg.b_hat_re).cwiseAbs().maxCoeff() <
          1e-12);
    // The projection slice's leading block is the MA matrix.
    CHECK((fit.xi_re[hs].leftCols(p) - fit.psi_re[hs]).cwiseAbs().maxCoeff() < 1e-10);
  }

  // Hard-thresholded slopes: entries either zero or untouched.
  for (std::size_t s = 0; s < 2; ++s)
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) {
        const double thr = fit.slopes_thr[s](i, j);
        const double raw = fit.fit.slopes[s](i, j);
        CHECK((thr == 0.0 || thr == raw));
        if (thr == 0.0) CHECK(std::abs(raw) <= fit.fit.lambda(i) + 1e-15);
      }

  // De-sparsified stacks cover exactly the requested rows.
  REQUIRE(fit.debias_rows == std::vector<Index>{0, 1, 4});
  CHECK(fit.debias_slot(0) == 0);
  CHECK(fit.debias_slot(4) == 2);
  CHECK(fit.debias_slot(3) == -1);
  CHECK(fit.psi_de[1].rows() == 3);
  CHECK(fit.theta_de[1].cols() == k);
  // Horizon zero: the de-sparsified response is the estimated impact row.
  for (Index slot = 0; slot < 3; ++slot)
    for (Index r = 0; r < k; ++r)
      CHECK(fit.theta_de[0](slot, r) ==
            fit.covreg.b_hat(fit.debias_rows[static_cast<std::size_t>(slot)], r));

  CHECK(fit.gamma != nullptr);
  CHECK(fit.gamma->dim() == 16);
  const MaVarianceContext ctx = fit.ma_context();
  CHECK(ctx.gamma == fit.gamma.get());
  CHECK(ctx.n == fit.n);
}

TEST_CASE("frozen penalties replay the fit") {
  // Cold restarts agree with the warm-started path solution only up to the
  // coordinate-descent tolerance, so the comparison is tight but not exact.
  const Fixture& fx = fixture();
  PipelineConfig cfg = fx.cfg;
  cfg.fixed_row_lambda = fx.fit.fit.lambda;
  cfg.covreg.fixed_lambda_b = fx.fit.covreg.lambda_b;
  cfg.covreg.fixed_lambda_w = fx.fit.covreg.lambda_w;
  const PipelineResult replay = run_pipeline(fx.panel.x, cfg);
  CHECK((replay.fit.lambda - fx.fit.fit.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK(replay.covreg.lambda_b == fx.fit.covreg.lambda_b);
  CHECK(replay.covreg.lambda_w == fx.fit.covreg.lambda_w);
  CHECK((replay.fit.slopes[0] - fx.fit.fit.slopes[0]).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((replay.fit.slopes[1] - fx.fit.fit.slopes[1]).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((replay.covreg.b_hat_re - fx.fit.covreg.b_hat_re).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((replay.covreg.sigma_w_re - fx.fit.covreg.sigma_w_re).cwiseAbs().maxCoeff() < 1e-5);
  CHECK((replay.theta_de[3] - fx.fit.theta_de[3]).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("empty de-biasing row list tracks every variable") {
  const Fixture& fx = fixture();
  PipelineConfig cfg = fx.cfg;
  cfg.horizon = 2;
  cfg.debias_rows.clear();
  const PipelineResult fit = run_pipeline(fx.panel.x, cfg);
  CHECK(fit.debias_rows.size() == 8);
  CHECK(fit.psi_de[1].rows() == 8);
  // The tracked subset agrees with the full run (same fitted model, same rows).
  for (Index j : fx.fit.debias_rows)
    CHECK((fit.psi_de[1].row(j) - fx.fit.psi_de[1].row(fx.fit.debias_slot(j)))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
}

TEST_CASE("disabling the centering keeps the raw scale") {
  const Fixture& fx = fixture();
  PipelineConfig cfg = fx.cfg;
  cfg.horizon = 1;
  cfg.center_panel = false;
  const PipelineResult fit = run_pipeline(fx.panel.x, cfg);
  CHECK(fit.col_means.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fx.fit.col_means.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("malformed pipeline inputs are rejected") {
  const Fixture& fx = fixture();
  PipelineConfig cfg = fx.cfg;
  cfg.d = 0;
  CHECK_THROWS_AS((void)run_pipeline(fx.panel.x, cfg), DataError);
  cfg = fx.cfg;
  cfg.horizon = -1;
  CHECK_THROWS_AS((void)run_pipeline(fx.panel.x, cfg), DataError);
  cfg = fx.cfg;
  cfg.shock_idx = {5, 2};
  CHECK_THROWS_AS((void)run_pipeline(fx.panel.x, cfg), DataError);
  cfg = fx.cfg;
  cfg.debias_rows = {11};
  CHECK_THROWS_AS((void)run_pipeline(fx.panel.x, cfg), DataError);
  cfg = fx.cfg;
  MatrixXd bad = fx.panel.x;
  bad(3, 3) = std::nan("");
  CHECK_THROWS_AS((void)run_pipeline(bad, cfg), DataError);
  CHECK_THROWS_AS((void)run_pipeline(fx.panel.x.topRows(3), cfg), DataError);
}
