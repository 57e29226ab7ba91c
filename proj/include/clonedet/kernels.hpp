#pragma once

#include <cstddef>

namespace clonedet::kernels {

// Dense double-vector kernels behind the embedding inner loops. Every
// operation has a scalar reference implementation and, on x86-64 with AVX2,
// a vectorized variant. One table is selected at startup; set
// CLONEDET_KERNELS=scalar (or =avx2) to force a variant.
//
// The elementwise operations (axpy, add, scale) produce bit-identical results
// in both variants; dot uses lane accumulators under AVX2, so it may differ
// from the scalar sum by ordinary rounding. Equivalence tests pin both facts.
struct Ops {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);  // y += alpha*x
  void (*add)(double* acc, const double* x, std::size_t n);               // acc += x
  void (*scale)(double* x, double alpha, std::size_t n);                  // x *= alpha
};

const Ops& scalar_ops();
bool avx2_available();
const Ops* avx2_ops();    // nullptr when the CPU or build lacks AVX2
const Ops& active_ops();  // the dispatch decision, made once

inline double dot(const double* a, const double* b, std::size_t n) {
  return active_ops().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active_ops().axpy(alpha, x, y, n);
}
inline void add(double* acc, const double* x, std::size_t n) { active_ops().add(acc, x, n); }
inline void scale(double* x, double alpha, std::size_t n) { active_ops().scale(x, alpha, n); }

}  // namespace clonedet::kernels
