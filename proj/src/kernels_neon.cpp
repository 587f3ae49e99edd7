// NEON variants for aarch64 (Advanced SIMD is baseline there, no runtime probe needed).
#if defined(HDSVAR_KERNELS_NEON)

#include <arm_neon.h>

#include "hdsvar/kernels.hpp"

namespace hdsvar::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double total = vaddvq_f64(acc0) + vaddvq_f64(acc1);
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sumsq_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(a + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double total = vaddvq_f64(acc);
  for (; i < n; ++i) total += a[i];
  return total;
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops{"neon", dot_neon, axpy_neon, sumsq_neon, sum_neon};
  return ops;
}

}  // namespace hdsvar::kernels

#endif  // HDSVAR_KERNELS_NEON
