#include "clonedet/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "clonedet/log.hpp"

namespace clonedet::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_scalar(double* acc, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void scale_scalar(double* x, double alpha, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

constexpr Ops kScalar{"scalar", dot_scalar, axpy_scalar, add_scalar, scale_scalar};

const Ops& pick_active() {
  const char* forced = std::getenv("CLONEDET_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return kScalar;
  const Ops* avx2 = avx2_ops();
  if (forced != nullptr && std::strcmp(forced, "avx2") == 0) {
    if (avx2 != nullptr) return *avx2;
    log::warn("CLONEDET_KERNELS=avx2 requested but AVX2 is unavailable, using scalar");
    return kScalar;
  }
  return avx2 != nullptr ? *avx2 : kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

bool avx2_available() { return avx2_ops() != nullptr; }

#ifndef CLONEDET_HAVE_AVX2_TU
const Ops* avx2_ops() { return nullptr; }
#endif

const Ops& active_ops() {
  static const Ops& active = pick_active();
  return active;
}

}  // namespace clonedet::kernels
