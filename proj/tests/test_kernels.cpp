#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "hdsvar/kernels.hpp"
#include "hdsvar/rng.hpp"

using namespace hdsvar;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("scalar kernels match hand-computed values") {
  const auto& ops = kernels::scalar_ops();
  const double a[] = {1.0, -2.0, 3.0, 0.5};
  const double b[] = {2.0, 1.0, -1.0, 4.0};
  CHECK(ops.dot(a, b, 4) == doctest::Approx(2.0 - 2.0 - 3.0 + 2.0).epsilon(1e-15));
  CHECK(ops.sumsq(a, 4) == doctest::Approx(1.0 + 4.0 + 9.0 + 0.25).epsilon(1e-15));
  CHECK(ops.sum(a, 4) == doctest::Approx(2.5).epsilon(1e-15));
  double y[] = {1.0, 1.0, 1.0, 1.0};
  ops.axpy(2.0, a, y, 4);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(-3.0));
  CHECK(y[2] == doctest::Approx(7.0));
  CHECK(y[3] == doctest::Approx(2.0));
  CHECK(ops.dot(a, b, 0) == 0.0);
  CHECK(ops.sum(a, 0) == 0.0);
}

TEST_CASE("every available backend agrees with the scalar reference") {
  const auto& reference = kernels::scalar_ops();
  Rng rng(991);
  // Lengths straddle the vector width so remainder loops are exercised.
  for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 15u, 64u, 257u, 1000u}) {
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    const double tol = 1e-13 * static_cast<double>(n + 1);
    for (const auto* ops : kernels::available_ops()) {
      CAPTURE(ops->name);
      CAPTURE(n);
      CHECK(std::abs(ops->dot(a.data(), b.data(), n) - reference.dot(a.data(), b.data(), n)) <=
            tol);
      CHECK(std::abs(ops->sumsq(a.data(), n) - reference.sumsq(a.data(), n)) <= tol);
      CHECK(std::abs(ops->sum(a.data(), n) - reference.sum(a.data(), n)) <= tol);
      auto y_ref = b;
      auto y_var = b;
      reference.axpy(0.7, a.data(), y_ref.data(), n);
      ops->axpy(0.7, a.data(), y_var.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y_var[i] - y_ref[i]) <= tol);
    }
  }
}

TEST_CASE("backend registry and active selection") {
  const auto& avail = kernels::available_ops();
  REQUIRE(!avail.empty());
  CHECK(avail.front() == &kernels::scalar_ops());
  CHECK(kernels::find_ops("scalar") == &kernels::scalar_ops());
  CHECK(kernels::find_ops("no-such-backend") == nullptr);
  const auto& active = kernels::active_ops();
  bool listed = false;
  for (const auto* ops : avail) listed = listed || (ops == &active);
  CHECK(listed);
}
