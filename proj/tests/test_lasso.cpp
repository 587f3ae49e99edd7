#include <cmath>
#include <vector>

#include "doctest.h"
#include "hdsvar/lasso.hpp"
#include "hdsvar/model.hpp"
#include "hdsvar/rng.hpp"

using namespace hdsvar;

namespace {

double objective(const MatrixXd& gram, const VectorXd& xty, double yty, Index nobs,
                 const VectorXd& weights, double lambda, const VectorXd& c) {
  const double rss = yty - 2.0 * c.dot(xty) + c.dot(gram * c);
  return rss / static_cast<double>(nobs) + lambda * (weights.array() * c.array().abs()).sum();
}

struct Problem {
  MatrixXd x;
  VectorXd y;
  MatrixXd gram;
  VectorXd xty;
  double yty;
};

Problem random_problem(Index nobs, Index q, Rng& rng) {
  Problem pr;
  pr.x.resize(nobs, q);
  for (Index i = 0; i < nobs; ++i)
    for (Index j = 0; j < q; ++j) pr.x(i, j) = rng.normal();
  VectorXd truth = VectorXd::Zero(q);
  truth(0) = 1.5;
  truth(2) = -0.8;
  pr.y = pr.x * truth;
  for (Index i = 0; i < nobs; ++i) pr.y(i) += 0.3 * rng.normal();
  pr.gram = pr.x.transpose() * pr.x;
  pr.xty = pr.x.transpose() * pr.y;
  pr.yty = pr.y.squaredNorm();
  return pr;
}

}  // namespace

TEST_CASE("coordinate descent hits the soft-threshold closed form on orthogonal designs") {
  // With X'X = nobs * I the minimizer is c_s = soft(xty_s / nobs, lambda w_s / 2).
  const Index nobs = 50, q = 5;
  const MatrixXd gram = static_cast<double>(nobs) * MatrixXd::Identity(q, q);
  VectorXd xty(q);
  xty << 40, -12, 3, 0.5, -60;
  VectorXd weights(q);
  weights << 1, 1, 2, 1, 0.5;
  const double lambda = 0.4;
  VectorXd coef = VectorXd::Zero(q);
  bool converged = false;
  LassoConfig cfg;
  coordinate_descent_gram(gram, xty, nobs, weights, lambda, coef, cfg, &converged);
  REQUIRE(converged);
  for (Index s = 0; s < q; ++s) {
    const double z = xty(s) / nobs;
    const double cut = lambda * weights(s) / 2.0;
    const double want = std::abs(z) <= cut ? 0.0 : (z > 0 ? z - cut : z + cut);
    CHECK(coef(s) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("coordinate descent satisfies the stationarity conditions on general designs") {
  Rng rng(31);
  LassoConfig cfg;
  for (int rep = 0; rep < 5; ++rep) {
    const Problem pr = random_problem(60, 12, rng);
    const VectorXd weights = VectorXd::Ones(12);
    for (double lambda : {0.01, 0.2, 1.0}) {
      VectorXd coef = VectorXd::Zero(12);
      bool converged = false;
      coordinate_descent_gram(pr.gram, pr.xty, 60, weights, lambda, coef, cfg, &converged);
      REQUIRE(converged);
      CHECK(kkt_violation(pr.gram, pr.xty, 60, weights, lambda, coef) <= 8 * cfg.tol);
      // Convex problem: no nearby point does better.
      const double at = objective(pr.gram, pr.xty, pr.yty, 60, weights, lambda, coef);
      for (int probe = 0; probe < 100; ++probe) {
        VectorXd delta(12);
        for (Index s = 0; s < 12; ++s) delta(s) = 1e-3 * rng.normal();
        CHECK(objective(pr.gram, pr.xty, pr.yty, 60, weights, lambda, coef + delta) >=
              at - 1e-10);
      }
    }
  }
}

TEST_CASE("gram_rss equals the direct residual sum of squares") {
  Rng rng(32);
  const Problem pr = random_problem(40, 8, rng);
  VectorXd c = VectorXd::Zero(8);
  c(0) = 1.2;
  c(3) = -0.4;
  const double direct = (pr.y - pr.x * c).squaredNorm();
  CHECK(gram_rss(pr.gram, pr.xty, pr.yty, c) == doctest::Approx(direct).epsilon(1e-12));
  CHECK(gram_rss(pr.gram, pr.xty, pr.yty, VectorXd::Zero(8)) ==
        doctest::Approx(pr.yty).epsilon(1e-12));
}

TEST_CASE("adaptive row fit reports the information criterion it minimizes") {
  Rng rng(33);
  const Problem pr = random_problem(80, 10, rng);
  LassoConfig cfg;
  const RowFit fit = adaptive_lasso_row(pr.gram, pr.xty, pr.yty, 80, 80, cfg);
  REQUIRE(fit.converged);
  REQUIRE(!fit.degenerate);
  const double rss = gram_rss(pr.gram, pr.xty, pr.yty, fit.coef);
  const double nnz = (fit.coef.array() != 0.0).count();
  CHECK(fit.bic == doctest::Approx(80.0 * std::log(rss / 80.0) + std::log(80.0) * nnz)
                       .epsilon(1e-10));
  // Both stages are stationary at the selected penalty.
  const VectorXd unit = VectorXd::Ones(10);
  CHECK(kkt_violation(pr.gram, pr.xty, 80, unit, fit.lambda, fit.stage1) <= 8 * cfg.tol);
  VectorXd w(10);
  for (Index s = 0; s < 10; ++s) w(s) = 1.0 / (1.0 / std::sqrt(80.0) + std::abs(fit.stage1(s)));
  CHECK(kkt_violation(pr.gram, pr.xty, 80, w, fit.lambda, fit.coef) <= 8 * cfg.tol);
  // The strong true coefficients survive selection.
  CHECK(fit.coef(0) == doctest::Approx(1.5).epsilon(0.15));
  CHECK(fit.coef(2) == doctest::Approx(-0.8).epsilon(0.25));
}

TEST_CASE("a fixed penalty skips the grid search") {
  Rng rng(34);
  const Problem pr = random_problem(60, 6, rng);
  LassoConfig cfg;
  const RowFit fit = adaptive_lasso_row(pr.gram, pr.xty, pr.yty, 60, 60, cfg, 0.35);
  CHECK(fit.lambda == 0.35);
  VectorXd w(6);
  for (Index s = 0; s < 6; ++s) w(s) = 1.0 / (1.0 / std::sqrt(60.0) + std::abs(fit.stage1(s)));
  CHECK(kkt_violation(pr.gram, pr.xty, 60, w, 0.35, fit.coef) <= 8 * cfg.tol);
}

TEST_CASE("a signal-free response is flagged degenerate") {
  const Index q = 4;
  const MatrixXd gram = 30.0 * MatrixXd::Identity(q, q);
  const VectorXd xty = VectorXd::Zero(q);
  LassoConfig cfg;
  const RowFit fit = adaptive_lasso_row(gram, xty, 0.0, 30, 30, cfg);
  CHECK(fit.degenerate);
  CHECK(fit.coef.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("VAR fit recovers a sparse slope matrix and replays under frozen penalties") {
  Rng rng(35);
  const Index p = 6, n = 800;
  MatrixXd a = MatrixXd::Zero(p, p);
  a(0, 0) = 0.6;
  a(1, 1) = -0.5;
  a(2, 0) = 0.4;
  a(3, 3) = 0.7;
  a(4, 5) = 0.35;
  a(5, 4) = -0.3;
  REQUIRE(spectral_radius(a) < 0.95);
  MatrixXd x = MatrixXd::Zero(n, p);
  for (Index t = 1; t < n; ++t) {
    x.row(t) = (a * x.row(t - 1).transpose()).transpose();
    for (Index j = 0; j < p; ++j) x(t, j) += 0.5 * rng.normal();
  }
  LassoConfig cfg;
  const VarFit fit = fit_var(x, 1, cfg);
  REQUIRE(fit.slopes.size() == 1);
  CHECK((fit.slopes[0] - a).cwiseAbs().maxCoeff() < 0.15);
  for (Index j = 0; j < p; ++j) {
    CHECK(fit.converged[static_cast<std::size_t>(j)]);
    CHECK(!fit.degenerate[static_cast<std::size_t>(j)]);
  }
  // Freezing the selected penalties reproduces the fit exactly.
  const VectorXd frozen = fit.lambda;
  const VarFit replay = fit_var(x, 1, cfg, &frozen);
  CHECK((replay.slopes[0] - fit.slopes[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((replay.lambda - fit.lambda).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a constant column yields a degenerate row, not a crash") {
  Rng rng(36);
  const Index n = 60;
  MatrixXd x(n, 3);
  for (Index t = 0; t < n; ++t) {
    x(t, 0) = rng.normal();
    x(t, 1) = rng.normal();
    x(t, 2) = 4.2;  // constant; centered away to exactly zero
  }
  LassoConfig cfg;
  const VarFit fit = fit_var(x, 1, cfg);
  CHECK(fit.degenerate[2]);
  CHECK(fit.slopes[0].row(2).cwiseAbs().maxCoeff() == 0.0);
}
