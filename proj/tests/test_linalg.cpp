#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tomo/error.hpp"
#include "tomo/linalg.hpp"
#include "tomo/matrix.hpp"
#include "tomo/rng.hpp"

using namespace tomo;

namespace {

// Test-only determinant via Gaussian elimination with partial pivoting.
double det(Matrix a) {
  const std::size_t n = a.rows();
  double d = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
    }
    if (a(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      d = -d;
    }
    d *= a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
    }
  }
  return d;
}

// Brute-force symmetric eigenvalues as roots of the characteristic
// polynomial, located by sign-change scan plus bisection. Good enough for
// well-separated 5x5 spectra; this is the independent oracle for the SVD.
std::vector<double> charpoly_eigenvalues(const Matrix& g) {
  const std::size_t n = g.rows();
  auto p = [&](double lam) {
    Matrix a = g;
    for (std::size_t i = 0; i < n; ++i) a(i, i) -= lam;
    return det(a);
  };
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += g(i, i);
  const double hi = trace + 1.0;

  std::vector<double> roots;
  const int grid = 200000;
  double prev_x = -1.0;
  double prev_v = p(prev_x);
  for (int k = 1; k <= grid && roots.size() < n; ++k) {
    const double x = -1.0 + (hi + 1.0) * static_cast<double>(k) / grid;
    const double v = p(x);
    if (v == 0.0) {
      roots.push_back(x);
    } else if ((prev_v < 0.0) != (v < 0.0)) {
      double lo = prev_x, up = x, vlo = prev_v;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + up);
        const double vm = p(mid);
        if ((vm < 0.0) == (vlo < 0.0)) {
          lo = mid;
          vlo = vm;
        } else {
          up = mid;
        }
      }
      roots.push_back(0.5 * (lo + up));
    }
    prev_x = x;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

Matrix gram_t(const Matrix& m) {
  Matrix g(m.cols(), m.cols());
  for (std::size_t a = 0; a < m.cols(); ++a) {
    for (std::size_t b = 0; b < m.cols(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, a) * m(i, b);
      g(a, b) = s;
    }
  }
  return g;
}

}  // namespace

TEST_CASE("normalize_columns basics") {
  Matrix m(2, 1);
  m(0, 0) = 3.0;
  m(1, 0) = 4.0;
  const Matrix n = normalize_columns(m);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n(1, 0) == doctest::Approx(0.8).epsilon(1e-12));

  const Matrix id = Matrix::identity(4);
  const Matrix nid = normalize_columns(id);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(nid(i, j) == id(i, j));
  }

  Matrix z(3, 2);
  z(0, 0) = 1.0;  // second column all zero
  CHECK_THROWS_AS(normalize_columns(z), Error);
}

TEST_CASE("normalize_columns postcondition and idempotence on gaussian input") {
  RngStream rng(11, 0);
  const Matrix g = gaussian_matrix(rng, 40, 7);
  const Matrix n1 = normalize_columns(g);
  for (double nc : column_norms(n1)) CHECK(std::fabs(nc - 1.0) <= 1e-12);
  const Matrix n2 = normalize_columns(n1);
  for (std::size_t i = 0; i < n1.rows(); ++i) {
    for (std::size_t j = 0; j < n1.cols(); ++j) {
      CHECK(n2(i, j) == doctest::Approx(n1(i, j)).epsilon(1e-14));
    }
  }
}

TEST_CASE("top_k_svd diagonal case") {
  Matrix m(3, 3);
  m(0, 0) = 3.0;
  m(1, 1) = 2.0;
  m(2, 2) = 1.0;
  const TopKSvd svd = top_k_svd(m, 2);
  CHECK(svd.singular_values[0] == doctest::Approx(3.0));
  CHECK(svd.singular_values[1] == doctest::Approx(2.0));
  CHECK(std::fabs(svd.u(0, 0)) == doctest::Approx(1.0));
  CHECK(std::fabs(svd.u(1, 1)) == doctest::Approx(1.0));
  CHECK(std::fabs(svd.u(1, 0)) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("top_k_svd rank one") {
  RngStream rng(3, 3);
  std::vector<double> u(6), v(4);
  for (double& x : u) x = rng.next_gaussian();
  for (double& x : v) x = rng.next_gaussian();
  Matrix m(6, 4);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = u[i] * v[j];
  }
  const TopKSvd svd = top_k_svd(m, 1);
  const double un = norm(u);
  // singular vector parallel to u
  const double align = std::fabs(kernels_dot_helper: ;
}
