#include "hdsvar/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hdsvar/csv.hpp"
#include "hdsvar/model.hpp"
#include "hdsvar/structural.hpp"

namespace hdsvar {

void DgpSpec::validate() const {
  if (p < 1 || n < 1 || d < 1) throw DataError("dgp spec: dimensions must be positive");
  if (k_a < 1 || k_a > p * d) throw DataError("dgp spec: k_a out of range");
  if (!(rho_target > 0.0 && rho_target < 1.0))
    throw DataError("dgp spec: target radius must be in (0, 1)");
  if (k_u < 1 || k_u > p) throw DataError("dgp spec: k_u out of range");
  if (k_b < 1 || k_b > p) throw DataError("dgp spec: k_b out of range");
  if (k_d < 1 || k_d > p) throw DataError("dgp spec: k_d out of range");
  if (!(eig_lo > 0.0 && eig_hi > eig_lo)) throw DataError("dgp spec: bad spectrum band");
  if (shock_of_interest < 0 || shock_of_interest >= k_u)
    throw DataError("dgp spec: shock of interest out of range");
  const auto idx = shocks();
  if (static_cast<Index>(idx.size()) != k_u)
    throw DataError("dgp spec: shock set size differs from k_u");
  validate_shock_indices(idx, p);
}

std::vector<Index> DgpSpec::shocks() const {
  if (!shock_idx.empty()) return shock_idx;
  std::vector<Index> idx(static_cast<std::size_t>(k_u));
  for (Index i = 0; i < k_u; ++i) idx[static_cast<std::size_t>(i)] = i;
  return idx;
}

DgpSpec dgp_preset(const std::string& name) {
  DgpSpec spec;
  std::string mods;
  if (name.rfind("class1", 0) == 0) {
    spec.d = 2;
    spec.rho_target = 0.9;
    mods = name.substr(6);
  } else if (name.rfind("class2", 0) == 0) {
    spec.d = 3;
    spec.rho_target = 0.95;
    mods = name.substr(6);
  } else {
    throw DataError("unknown dgp preset: " + name);
  }
  const bool class1 = spec.d == 2;
  for (char c : mods) {
    switch (c) {
      case 'a':
        if (class1) {
          spec.k_u = 8;
          spec.k_b = 10;
          spec.k_d = 10;
          spec.shock_of_interest = 5;
        } else {
          spec.p = 200;
        }
        break;
      case 'b':
        spec.n = 200;
        break;
      case 'c':
        if (!class1) throw DataError("preset modification '" + std::string(1, c) +
                                     "' is not defined for class2");
        spec.k_a = 10;
        break;
      case 'd':
        if (!class1) throw DataError("preset modification '" + std::string(1, c) +
                                     "' is not defined for class2");
        spec.law = InnovationLaw::student_t10;
        break;
      default:
        throw DataError("unknown preset modification '" + std::string(1, c) + "' in " + name);
    }
  }
  spec.validate();
  return spec;
}

InnovationLaw parse_law(const std::string& name) {
  if (name == "gaussian") return InnovationLaw::gaussian;
  if (name == "student_t10") return InnovationLaw::student_t10;
  throw DataError("unknown innovation law: " + name);
}

std::string law_name(InnovationLaw law) {
  return law == InnovationLaw::gaussian ? "gaussian" : "student_t10";
}

std::vector<MatrixXd> GeneratedDgp::theta(int horizon) const {
  return structural_irf(ma_coefficients(slopes, horizon), b);
}

namespace {

// Keeps the `keep` largest-magnitude entries of the row values, zeroing the rest.
void truncate_values(std::vector<double*>& cells, Index keep) {
  if (static_cast<Index>(cells.size()) <= keep) return;
  std::nth_element(cells.begin(), cells.begin() + keep, cells.end(),
                   [](const double* a, const double* b) { return std::abs(*a) > std::abs(*b); });
  for (std::size_t k = static_cast<std::size_t>(keep); k < cells.size(); ++k) *cells[k] = 0.0;
}

// Rescales the slope draw by a single factor so the companion radius hits the
// target; returns false when no bracket exists (degenerate draw).
bool calibrate_radius(std::vector<MatrixXd>& slopes, double target) {
  auto radius_at = [&](double f) {
    std::vector<MatrixXd> scaled = slopes;
    for (auto& a : scaled) a *= f;
    return spectral_radius(companion(scaled));
  };
  const double rho1 = radius_at(1.0);
  if (!std::isfinite(rho1) || rho1 <= 0.0) return false;
  double lo = 0.0;
  double hi = target / rho1;
  int grow = 0;
  while (radius_at(hi) < target) {
    hi *= 2.0;
    if (++grow > 60) return false;
  }
  double f = hi;
  for (int it = 0; it < 200; ++it) {
    f = 0.5 * (lo + hi);
    const double rho = radius_at(f);
    if (std::abs(rho - target) <= 1e-8) break;
    if (rho < target)
      lo = f;
    else
      hi = f;
  }
  if (std::abs(radius_at(f) - target) > 1e-6) return false;
  for (auto& a : slopes) a *= f;
  return true;
}

MatrixXd random_orthogonal(Index p, Rng& rng) {
  MatrixXd m(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(m);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

// Symmetric-intersection truncation: entry (i, j) survives iff it ranks among the
// `keep` largest magnitudes in both row i and row j. Keeps symmetry and bounds the
// per-row count.
MatrixXd truncate_symmetric(const MatrixXd& s, Index keep) {
  const Index p = s.rows();
  std::vector<std::vector<char>> in_row(static_cast<std::size_t>(p),
                                        std::vector<char>(static_cast<std::size_t>(p), 0));
  std::vector<Index> order(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) order[static_cast<std::size_t>(j)] = j;
    std::nth_element(order.begin(), order.begin() + keep, order.end(),
                     [&](Index a, Index b) { return std::abs(s(i, a)) > std::abs(s(i, b)); });
    for (Index k = 0; k < keep; ++k)
      in_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  }
  MatrixXd out = MatrixXd::Zero(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j)
      if (in_row[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
          in_row[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
        out(i, j) = s(i, j);
  return out;
}

// Largest off-diagonal shrink factor in [0, 1] keeping the matrix PSD; the
// diagonal alone (gamma = 0) is always PSD, so bisection is safe.
MatrixXd repair_psd(const MatrixXd& s) {
  const Index p = s.rows();
  const MatrixXd diag = s.diagonal().asDiagonal();
  const MatrixXd off = s - diag;
  auto min_eig = [&](double gamma) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(diag + gamma * off,
                                                Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  };
  const double scale = std::max(1.0, s.diagonal().maxCoeff());
  if (min_eig(1.0) >= -1e-12 * scale) return s;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_eig(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return diag + lo * off;
}

MatrixXd symmetric_sqrt(const MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(s);
  if (eig.info() != Eigen::Success) throw NumericError("dgp: eigendecomposition failed");
  const VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * vals.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
}

void write_rows(std::ostream& out, const MatrixXd& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << csv::format_double(m(i, j));
    }
    out << '\n';
  }
}

MatrixXd read_rows(std::istream& in, Index rows, Index cols, const std::string& what) {
  MatrixXd m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw DataError("dgp file: truncated " + what + " block");
    std::istringstream row(line);
    std::string token;
    for (Index j = 0; j < cols; ++j) {
      if (!(row >> token)) throw DataError("dgp file: short row in " + what + " block");
      m(i, j) = csv::parse_double(token, what);
    }
    if (row >> token) throw DataError("dgp file: extra fields in " + what + " block");
  }
  return m;
}

}  // namespace

GeneratedDgp generate_dgp(const DgpSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index p = spec.p;
  const Index k = spec.k_u;
  const auto shocks = spec.shocks();
  Rng rng = Rng(seed).child(0xD6Full);

  for (int attempt = 0; attempt < 100; ++attempt) {
    // Slopes: dense Gaussian draw, joint row truncation across all lags, then a
    // global rescale onto the target companion radius.
    std::vector<MatrixXd> slopes(static_cast<std::size_t>(spec.d));
    for (auto& a : slopes) {
      a.resize(p, p);
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    for (Index i = 0; i < p; ++i) {
      std::vector<double*> cells;
      cells.reserve(static_cast<std::size_t>(p * spec.d));
      for (auto& a : slopes)
        for (Index j = 0; j < p; ++j) cells.push_back(&a(i, j));
      truncate_values(cells, spec.k_a);
    }
    if (!calibrate_radius(slopes, spec.rho_target)) continue;

    // Covariance: uniform spectrum on the band with Haar-random eigenvectors,
    // split through the shock-block Cholesky factor so the shock equations are
    // noise-free and recursively identified.
    const MatrixXd q = random_orthogonal(p, rng);
    VectorXd lambda(p);
    for (Index i = 0; i < p; ++i) lambda(i) = rng.uniform(spec.eig_lo, spec.eig_hi);
    MatrixXd sigma = q * lambda.asDiagonal() * q.transpose();
    sigma = 0.5 * (sigma + sigma.transpose()).eval();

    MatrixXd sigma_shock(k, k);
    for (Index a = 0; a < k; ++a)
      for (Index c = 0; c < k; ++c)
        sigma_shock(a, c) = sigma(shocks[static_cast<std::size_t>(a)],
                                  shocks[static_cast<std::size_t>(c)]);
    Eigen::LLT<MatrixXd> llt(sigma_shock);
    if (llt.info() != Eigen::Success) continue;
    const MatrixXd chol = llt.matrixL();

    MatrixXd b(p, k);
    for (Index i = 0; i < p; ++i) {
      VectorXd srow(k);
      for (Index c = 0; c < k; ++c) srow(c) = sigma(i, shocks[static_cast<std::size_t>(c)]);
      // row of Sigma[ . , I] P^{-T}
      b.row(i) = chol.triangularView<Eigen::Lower>().solve(srow).transpose();
    }
    for (Index a = 0; a < k; ++a) b.row(shocks[static_cast<std::size_t>(a)]) = chol.row(a);

    MatrixXd sigma_w = sigma - b * b.transpose();
    for (Index a = 0; a < k; ++a) {
      sigma_w.row(shocks[static_cast<std::size_t>(a)]).setZero();
      sigma_w.col(shocks[static_cast<std::size_t>(a)]).setZero();
    }
    sigma_w = 0.5 * (sigma_w + sigma_w.transpose()).eval();

    // Truncations; the shock block of B must keep its diagonal for the recursive
    // ordering to stay well defined.
    for (Index c = 0; c < k; ++c) {
      std::vector<double*> cells;
      cells.reserve(static_cast<std::size_t>(p));
      for (Index i = 0; i < p; ++i) cells.push_back(&b(i, c));
      truncate_values(cells, spec.k_b);
    }
    bool diag_lost = false;
    for (Index c = 0; c < k; ++c)
      if (b(shocks[static_cast<std::size_t>(c)], c) == 0.0) diag_lost = true;
    if (diag_lost) continue;

    sigma_w = repair_psd(truncate_symmetric(sigma_w, spec.k_d));

    MatrixXd sigma_eps = b * b.transpose() + sigma_w;
    sigma_eps = 0.5 * (sigma_eps + sigma_eps.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma_eps, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 1e-12)) continue;
    if (lmax / lmin > (spec.eig_hi / spec.eig_lo) * (1.0 - 1e-9)) continue;
    // Geometric centering maps [lmin, lmax] inside the band whenever the
    // condition number fits; the rescale preserves sparsity and the split.
    const double c = std::sqrt(spec.eig_lo * spec.eig_hi) / std::sqrt(lmin * lmax);
    b *= std::sqrt(c);
    sigma_w *= c;
    sigma_eps *= c;

    GeneratedDgp out;
    out.spec = spec;
    out.spec.shock_idx = shocks;
    out.seed = seed;
    out.slopes = std::move(slopes);
    out.b = std::move(b);
    out.sigma_w = std::move(sigma_w);
    out.sigma_eps = std::move(sigma_eps);
    out.d_factor = symmetric_sqrt(out.sigma_w);
    return out;
  }
  throw NumericError("dgp generation failed after 100 attempts");
}

TimeSeriesPanel simulate(const GeneratedDgp& dgp, Index n, int burn_in, InnovationLaw law,
                         Rng& rng) {
  if (n < 1) throw DataError("simulate: length must be positive");
  if (burn_in < 0) throw DataError("simulate: negative burn-in");
  const Index p = dgp.b.rows();
  const Index k = dgp.b.cols();
  const auto d = static_cast<int>(dgp.slopes.size());
  const Index total = n + burn_in;
  auto draw = [&]() {
    return law == InnovationLaw::gaussian ? rng.normal() : rng.student_t(10, true);
  };
  MatrixXd x = MatrixXd::Zero(total, p);
  VectorXd u(k), w(p);
  for (Index t = 0; t < total; ++t) {
    for (Index i = 0; i < k; ++i) u(i) = draw();
    for (Index i = 0; i < p; ++i) w(i) = draw();
    VectorXd row = dgp.b * u + dgp.d_factor * w;
    for (int s = 1; s <= d; ++s) {
      if (t - s < 0) break;
      row.noalias() += dgp.slopes[static_cast<std::size_t>(s - 1)] * x.row(t - s).transpose();
    }
    x.row(t) = row.transpose();
  }
  if (!x.allFinite()) throw NumericError("simulate: series diverged");
  TimeSeriesPanel panel;
  panel.x = x.bottomRows(n);
  return panel;
}

void save_dgp(const std::string& path, const GeneratedDgp& dgp) {
  std::ofstream file(path);
  if (!file) throw DataError("cannot open dgp file for writing: " + path);
  const auto& s = dgp.spec;
  file << "hdsvar-dgp v1\n";
  file << "p " << s.p << "\n";
  file << "n " << s.n << "\n";
  file << "d " << s.d << "\n";
  file << "k_a " << s.k_a << "\n";
  file << "rho " << csv::format_double(s.rho_target) << "\n";
  file << "k_u " << s.k_u << "\n";
  file << "shock_idx";
  for (Index idx : s.shocks()) file << ' ' << idx;
  file << "\n";
  file << "shock_of_interest " << s.shock_of_interest << "\n";
  file << "k_b " << s.k_b << "\n";
  file << "k_d " << s.k_d << "\n";
  file << "eig_lo " << csv::format_double(s.eig_lo) << "\n";
  file << "eig_hi " << csv::format_double(s.eig_hi) << "\n";
  file << "law " << law_name(s.law) << "\n";
  file << "seed " << dgp.seed << "\n";
  for (std::size_t lag = 0; lag < dgp.slopes.size(); ++lag) {
    file << "A " << lag + 1 << "\n";
    write_rows(file, dgp.slopes[lag]);
  }
  file << "B\n";
  write_rows(file, dgp.b);
  file << "SIGMA_W\n";
  write_rows(file, dgp.sigma_w);
  if (!file) throw DataError("write failed: " + path);
}

GeneratedDgp load_dgp(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("cannot open dgp file: " + path);
  std::string line;
  if (!std::getline(file, line) || line != "hdsvar-dgp v1")
    throw DataError("dgp file: missing 'hdsvar-dgp v1' header");
  GeneratedDgp dgp;
  DgpSpec& s = dgp.spec;
  auto expect = [&](const std::string& key) -> std::istringstream {
    if (!std::getline(file, line)) throw DataError("dgp file: missing field " + key);
    std::istringstream in(line);
    std::string name;
    in >> name;
    if (name != key) throw DataError("dgp file: expected field " + key + ", got " + name);
    return in;
  };
  expect("p") >> s.p;
  expect("n") >> s.n;
  expect("d") >> s.d;
  expect("k_a") >> s.k_a;
  {
    auto in = expect("rho");
    std::string tok;
    in >> tok;
    s.rho_target = csv::parse_double(tok, "rho");
  }
  expect("k_u") >> s.k_u;
  {
    auto in = expect("shock_idx");
    s.shock_idx.clear();
    Index idx;
    while (in >> idx) s.shock_idx.push_back(idx);
  }
  expect("shock_of_interest") >> s.shock_of_interest;
  expect("k_b") >> s.k_b;
  expect("k_d") >> s.k_d;
  {
    auto in = expect("eig_lo");
    std::string tok;
    in >> tok;
    s.eig_lo = csv::parse_double(tok, "eig_lo");
  }
  {
    auto in = expect("eig_hi");
    std::string tok;
    in >> tok;
    s.eig_hi = csv::parse_double(tok, "eig_hi");
  }
  {
    auto in = expect("law");
    std::string tok;
    in >> tok;
    s.law = parse_law(tok);
  }
  expect("seed") >> dgp.seed;
  s.validate();
  dgp.slopes.resize(static_cast<std::size_t>(s.d));
  for (int lag = 1; lag <= s.d; ++lag) {
    auto in = expect("A");
    int got = 0;
    in >> got;
    if (got != lag) throw DataError("dgp file: slope blocks out of order");
    dgp.slopes[static_cast<std::size_t>(lag - 1)] = read_rows(file, s.p, s.p, "slope");
  }
  expect("B");
  dgp.b = read_rows(file, s.p, s.k_u, "impact");
  expect("SIGMA_W");
  dgp.sigma_w = read_rows(file, s.p, s.p, "noise covariance");
  dgp.sigma_eps = dgp.b * dgp.b.transpose() + dgp.sigma_w;
  dgp.d_factor = symmetric_sqrt(dgp.sigma_w);
  return dgp;
}

}  // namespace hdsvar
