#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "clonedet/kernels.hpp"
#include "clonedet/rng.hpp"

using namespace clonedet;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_double(lo, hi);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels compute the expected values") {
  const kernels::Ops& ops = kernels::scalar_ops();
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  CHECK(ops.dot(a, b, 3) == doctest::Approx(1 * 4 - 2 * 5 + 3 * 6));
  CHECK(ops.dot(a, b, 0) == 0.0);

  double y[] = {1.0, 1.0, 1.0};
  ops.axpy(2.0, a, y, 3);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 5.0);
  CHECK(y[2] == 7.0);

  double acc[] = {0.5, 0.5, 0.5};
  ops.add(acc, a, 3);
  CHECK(acc[0] == 1.5);
  CHECK(acc[2] == 3.5);

  double x[] = {2.0, -4.0};
  ops.scale(x, 0.5, 2);
  CHECK(x[0] == 1.0);
  CHECK(x[1] == -2.0);
}

TEST_CASE("avx2 variant agrees with the scalar reference") {
  const kernels::Ops* avx2 = kernels::avx2_ops();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 unavailable on this machine; dispatch falls back to scalar");
    CHECK(std::strcmp(kernels::active_ops().name, "scalar") == 0);
    return;
  }
  const kernels::Ops& scalar = kernels::scalar_ops();
  Rng rng(42);

  // dot: lane accumulators reorder the sum, so compare within rounding noise
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{7},
                        std::size_t{8}, std::size_t{13}, std::size_t{64}, std::size_t{100},
                        std::size_t{257}}) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const double expected = scalar.dot(a.data(), b.data(), n);
    const double actual = avx2->dot(a.data(), b.data(), n);
    CHECK(actual == doctest::Approx(expected).epsilon(1e-12));
  }

  // elementwise ops must match bit for bit, including the vector tails
  for (std::size_t n : {std::size_t{1}, std::size_t{5}, std::size_t{100}, std::size_t{103}}) {
    const auto x = random_vector(rng, n);
    const double alpha = rng.next_double(-3.0, 3.0);

    auto y_scalar = random_vector(rng, n);
    auto y_avx2 = y_scalar;
    scalar.axpy(alpha, x.data(), y_scalar.data(), n);
    avx2->axpy(alpha, x.data(), y_avx2.data(), n);
    CHECK(std::memcmp(y_scalar.data(), y_avx2.data(), n * sizeof(double)) == 0);

    auto acc_scalar = random_vector(rng, n);
    auto acc_avx2 = acc_scalar;
    scalar.add(acc_scalar.data(), x.data(), n);
    avx2->add(acc_avx2.data(), x.data(), n);
    CHECK(std::memcmp(acc_scalar.data(), acc_avx2.data(), n * sizeof(double)) == 0);

    auto s_scalar = x;
    auto s_avx2 = x;
    scalar.scale(s_scalar.data(), alpha, n);
    avx2->scale(s_avx2.data(), alpha, n);
    CHECK(std::memcmp(s_scalar.data(), s_avx2.data(), n * sizeof(double)) == 0);
  }
}

TEST_CASE("active dispatch picks a valid table") {
  const kernels::Ops& active = kernels::active_ops();
  const bool is_scalar = std::strcmp(active.name, "scalar") == 0;
  const bool is_avx2 = std::strcmp(active.name, "avx2") == 0;
  CHECK((is_scalar || is_avx2));
  if (is_avx2) CHECK(kernels::avx2_available());
  const double a[] = {1.0, 2.0};
  const double b[] = {3.0, 4.0};
  CHECK(kernels::dot(a, b, 2) == doctest::Approx(11.0));
}

TEST_CASE("rng is deterministic and bounded") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(5);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = c.next_below(7);
    CHECK(v < 7);
    const double d = c.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
  }
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
}
