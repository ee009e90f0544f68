#include <doctest.h>

#include <cmath>
#include <vector>

#include "tomo/kernels.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

std::vector<double> random_vec(RngStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.next_gaussian();
  return v;
}

bool close_rel(double a, double b, double scale) {
  return std::fabs(a - b) <= 1e-12 * (scale + 1.0);
}

}  // namespace

// The AVX2 variants must agree with the scalar reference on every length,
// including the remainder tails. FMA reassociation only moves the last bits.
TEST_CASE("simd variants match scalar reference") {
  if (kernels::active_isa() != kernels::Isa::avx2) {
    MESSAGE("AVX2 not available; dispatcher already on scalar");
    return;
  }
  RngStream rng(2024, 1);
  for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 1001}) {
    std::vector<double> x = random_vec(rng, n);
    std::vector<double> y = random_vec(rng, n);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::fabs(x[i] * y[i]);

    CHECK(close_rel(kernels::detail::dot_avx2(x.data(), y.data(), n),
                    kernels::detail::dot_scalar(x.data(), y.data(), n), scale));
    CHECK(close_rel(kernels::detail::sumsq_avx2(x.data(), n),
                    kernels::detail::sumsq_scalar(x.data(), n), scale));
    CHECK(close_rel(kernels::detail::sum_avx2(x.data(), n),
                    kernels::detail::sum_scalar(x.data(), n), scale));

    std::vector<double> y1 = y, y2 = y;
    kernels::detail::axpy_avx2(1.7, x.data(), y1.data(), n);
    kernels::detail::axpy_scalar(1.7, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(y1[i], y2[i], std::fabs(y2[i])));

    std::vector<double> x1 = x, x2 = x;
    kernels::detail::scale_avx2(x1.data(), -0.3, n);
    kernels::detail::scale_scalar(x2.data(), -0.3, n);
    for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);
  }
}

TEST_CASE("dot against hand values") {
  const double x[] = {1.0, 2.0, 3.0};
  const double y[] = {4.0, -5.0, 6.0};
  CHECK(kernels::dot(x, y, 3) == doctest::Approx(12.0));
  CHECK(kernels::sumsq(x, 3) == doctest::Approx(14.0));
  CHECK(kernels::sum(y, 3) == doctest::Approx(5.0));
}

TEST_CASE("force_isa switches the dispatcher") {
  const kernels::Isa original = kernels::active_isa();
  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  const double x[] = {2.0, 3.0};
  CHECK(kernels::dot(x, x, 2) == doctest::Approx(13.0));
  kernels::force_isa(original);
  CHECK(kernels::active_isa() == original);
}
