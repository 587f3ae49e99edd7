#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hdsvar/rng.hpp"
#include "hdsvar/types.hpp"

namespace hdsvar {

enum class InnovationLaw { gaussian, student_t10 };

// Random sparse-SVAR generator settings. Counts are upper bounds enforced by
// magnitude truncation (keep the largest entries, zero the rest).
struct DgpSpec {
  Index p = 100;
  Index n = 100;
  int d = 2;
  Index k_a = 5;                 // nonzeros kept per stacked slope row [A_1 .. A_d]
  double rho_target = 0.9;       // companion spectral radius after rescaling
  Index k_u = 4;                 // number of structural shocks
  std::vector<Index> shock_idx;  // shock-bearing variables; empty = {0..k_u-1}
  Index shock_of_interest = 3;   // 0-based column of u
  Index k_b = 5;                 // nonzeros kept per column of B
  Index k_d = 5;                 // nonzeros kept per row/column of Sigma_w
  double eig_lo = 0.5;           // Sigma_eps spectrum band
  double eig_hi = 5.0;
  InnovationLaw law = InnovationLaw::gaussian;

  void validate() const;
  std::vector<Index> shocks() const;  // resolved, validated index set
};

// Named presets: "class1" (VAR(2), radius 0.9) and "class2" (VAR(3), radius 0.95),
// each p=n=100, k_a=5, k_u=4, k_b=k_d=5, Gaussian, shock of interest 4th. Trailing
// letters apply modifications cumulatively and order-independently:
//   class1: a (k_u=8, k_b=k_d=10, 6th shock), b (n=200), c (k_a=10), d (t(10) noise)
//   class2: a (p=200), b (n=200)
DgpSpec dgp_preset(const std::string& name);

InnovationLaw parse_law(const std::string& name);
std::string law_name(InnovationLaw law);

struct GeneratedDgp {
  DgpSpec spec;
  std::uint64_t seed = 0;
  std::vector<MatrixXd> slopes;  // A_1..A_d, jointly row-sparse
  MatrixXd b;                    // p x k_u, shock block lower triangular
  MatrixXd sigma_w;              // p x p PSD, shock rows/columns zero
  MatrixXd sigma_eps;            // B B' + Sigma_w, spectrum inside [eig_lo, eig_hi]
  MatrixXd d_factor;             // symmetric PSD square root of sigma_w

  // True structural responses Theta_h = Psi_h B for h = 0..horizon.
  std::vector<MatrixXd> theta(int horizon) const;
};

// Draws slopes (dense Gaussian, row-truncated, globally rescaled onto the target
// radius by bisection) and a random covariance with uniform spectrum on the band,
// split into B B' + Sigma_w via the shock-block Cholesky factor, truncated, PSD-
// repaired, and rescaled back onto the band. Pathological draws are redrawn, at
// most 100 times.
GeneratedDgp generate_dgp(const DgpSpec& spec, std::uint64_t seed);

// Simulates n rows of X_t = sum_s A_s X_{t-s} + B u_t + D w_t from zero starting
// values, discarding `burn_in` leading rows. u and w coordinates are i.i.d. with
// unit variance under `law` (t(10) draws are rescaled by sqrt(8/10)).
TimeSeriesPanel simulate(const GeneratedDgp& dgp, Index n, int burn_in, InnovationLaw law,
                         Rng& rng);

// Line-oriented "hdsvar-dgp v1" text format; save/load round-trips exactly
// (shortest round-trip floats). sigma_eps and d_factor are rebuilt on load.
void save_dgp(const std::string& path, const GeneratedDgp& dgp);
GeneratedDgp load_dgp(const std::string& path);

}  // namespace hdsvar
