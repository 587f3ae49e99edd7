#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hdsvar {

// Deterministic random stream. std::mt19937_64 supplies the raw bits (its output
// sequence is fixed by the standard); all variate transforms are implemented here
// explicitly because the std <random> distributions are implementation-defined and
// would break byte-identical reruns across standard libraries.
//
// Parallel work derives one child stream per task from (seed, stream id), so results
// do not depend on how tasks are scheduled across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Independent stream for subtask `stream` (replicate index, stage tag, ...).
  Rng child(std::uint64_t stream) const { return Rng(derive(seed_, stream)); }

  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull));
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, bound), bound >= 1 (Lemire rejection).
  std::uint64_t uniform_int(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(gen_()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t floor = (0 - bound) % bound;
      while (lo < floor) {
        m = static_cast<unsigned __int128>(gen_()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Standard normal (Marsaglia polar, one spare cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  // Student t with `df` degrees of freedom (ratio of a normal to a chi square),
  // optionally standardized to unit variance (requires df > 2).
  double student_t(int df, bool unit_variance) {
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
      const double g = normal();
      chi2 += g * g;
    }
    double t = z / std::sqrt(chi2 / static_cast<double>(df));
    if (unit_variance) t *= std::sqrt(static_cast<double>(df - 2) / static_cast<double>(df));
    return t;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hdsvar
