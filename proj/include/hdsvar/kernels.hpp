#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hdsvar::kernels {

// Contiguous double-precision primitives for the iterative solvers (coordinate
// descent spends nearly all of its time here). Every backend computes the same
// quantities; vector backends may differ from the scalar reference only through
// floating-point reassociation, which the equivalence tests bound.
struct Ops {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sumsq)(const double* a, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
};

// Portable reference implementation (always available).
const Ops& scalar_ops();

// Backends compiled into this binary and usable on the executing CPU,
// scalar first, fastest last.
const std::vector<const Ops*>& available_ops();

// Backend by name ("scalar", "avx2", "neon"); nullptr if absent.
const Ops* find_ops(const std::string& name);

// Preferred backend for this process: the HDSVAR_KERNELS environment variable
// (if set to an available backend name) wins, otherwise the fastest available.
// Resolved once on first use.
const Ops& active_ops();

}  // namespace hdsvar::kernels
