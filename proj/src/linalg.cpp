#include "tomo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

namespace {

// One cyclic Jacobi sweep; returns the off-diagonal Frobenius norm consumed.
void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double tau = (aqq - app) / (2.0 * apq);
  // Smaller-magnitude root for a stable rotation angle.
  const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

double offdiag_sq(const Matrix& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) acc += a(i, j) * a(i, j);
  }
  return 2.0 * acc;
}

// Flip each column so its largest-magnitude entry is positive. Keeps
// eigenvector/singular-vector output reproducible across calls.
void canonicalize_signs(Matrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double mag = std::fabs(m(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (m(arg, j) < 0.0) {
      for (std::size_t i = 0; i < m.rows(); ++i) m(i, j) = -m(i, j);
    }
  }
}

}  // namespace

SymEig eigh(const Matrix& s) {
  if (s.rows() != s.cols()) {
    throw Error(Error::Kind::invalid_argument, "eigh: matrix not square");
  }
  const std::size_t n = s.rows();
  Matrix a = s;
  Matrix v = Matrix::identity(n);

  const double scale = std::max(a.frobenius_sq(), 1e-300);
  for (int sweep = 0; sweep < 64; ++sweep) {
    if (offdiag_sq(a) <= 1e-28 * scale) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEig out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  canonicalize_signs(out.vectors);
  return out;
}

namespace {

Matrix gram(const Matrix& m, bool column_side) {
  // column_side: m^T m (cols x cols); otherwise m m^T (rows x rows).
  if (column_side) {
    Matrix g(m.cols(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double* r = m.row(i);
      for (std::size_t a = 0; a < m.cols(); ++a) {
        kernels::axpy(r[a], r, g.row(a), m.cols());
      }
    }
    return g;
  }
  Matrix g(m.rows(), m.rows());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (std::size_t b = a; b < m.rows(); ++b) {
      const double d = kernels::dot(m.row(a), m.row(b), m.cols());
      g(a, b) = d;
      g(b, a) = d;
    }
  }
  return g;
}

// Replace near-null columns (rank deficit) with an orthonormal completion
// built from canonical basis vectors, so the orthonormality contract holds
// even for low-rank inputs.
void complete_columns(Matrix& u, std::size_t from) {
  const std::size_t rows = u.rows();
  std::size_t next_axis = 0;
  for (std::size_t j = from; j < u.cols(); ++j) {
    while (true) {
      if (next_axis >= rows) {
        throw Error(Error::Kind::degenerate_basis,
                    "top_k_svd: cannot complete orthonormal basis");
      }
      std::vector<double> cand(rows, 0.0);
      cand[next_axis++] = 1.0;
      for (std::size_t c = 0; c < j; ++c) {
        double proj = 0.0;
        for (std::size_t i = 0; i < rows; ++i) proj += u(i, c) * cand[i];
        for (std::size_t i = 0; i < rows; ++i) cand[i] -= proj * u(i, c);
      }
      const double n2 = kernels::sumsq(cand.data(), rows);
      if (n2 > 1e-8) {
        const double inv = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < rows; ++i) u(i, j) = cand[i] * inv;
        break;
      }
    }
  }
}

}  // namespace

TopKSvd top_k_svd(const Matrix& m, std::size_t k) {
  const std::size_t mindim = std::min(m.rows(), m.cols());
  if (k == 0 || k > mindim) {
    throw Error(Error::Kind::invalid_argument,
                "top_k_svd: k must be in [1, min(rows, cols)]");
  }

  TopKSvd out;
  out.singular_values.resize(k);
  out.u = Matrix(m.rows(), k);

  if (m.rows() < m.cols()) {
    // Row-side Gram: eigenvectors of m m^T are the left singular vectors.
    SymEig eg = eigh(gram(m, /*column_side=*/false));
    for (std::size_t j = 0; j < k; ++j) {
      out.singular_values[j] = std::sqrt(std::max(eg.values[j], 0.0));
      for (std::size_t i = 0; i < m.rows(); ++i) out.u(i, j) = eg.vectors(i, j);
    }
  } else {
    SymEig eg = eigh(gram(m, /*column_side=*/true));
    const double sigma_max = std::sqrt(std::max(eg.values[0], 0.0));
    const double cutoff = sigma_max * 1e-10;
    std::size_t valid = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const double sigma = std::sqrt(std::max(eg.values[j], 0.0));
      out.singular_values[j] = sigma;
      if (sigma <= cutoff) break;
      // u_j = m v_j / sigma_j
      const std::vector<double> vj = eg.vectors.column(j);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        out.u(i, j) = kernels::dot(m.row(i), vj.data(), m.cols()) / sigma;
      }
      ++valid;
    }
    // Light reorthogonalization pass; the Gram route can lose a few digits
    // on clustered singular values.
    for (std::size_t j = 0; j < valid; ++j) {
      std::vector<double> col = out.u.column(j);
      for (std::size_t c = 0; c < j; ++c) {
        double proj = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i) proj += out.u(i, c) * col[i];
        for (std::size_t i = 0; i < m.rows(); ++i) col[i] -= proj * out.u(i, c);
      }
      const double inv = 1.0 / std::sqrt(kernels::sumsq(col.data(), col.size()));
      for (std::size_t i = 0; i < m.rows(); ++i) out.u(i, j) = col[i] * inv;
    }
    if (valid < k) complete_columns(out.u, valid);
  }

  canonicalize_signs(out.u);
  return out;
}

std::vector<double> solve_symmetric(const Matrix& s, std::span<const double> b) {
  if (s.rows() != s.cols() || s.rows() != b.size()) {
    throw Error(Error::Kind::invalid_argument, "solve_symmetric: shape mismatch");
  }
  double maxabs = 1.0;
  for (double v : s.data()) maxabs = std::max(maxabs, std::fabs(v));
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = i + 1; j < s.cols(); ++j) {
      if (std::fabs(s(i, j) - s(j, i)) > 1e-10 * maxabs) {
        throw Error(Error::Kind::not_symmetric, "solve_symmetric: input not symmetric");
      }
    }
  }

  SymEig eg = eigh(s);
  double lam_max = 0.0;
  for (double v : eg.values) lam_max = std::max(lam_max, std::fabs(v));
  const double cutoff = lam_max * 1e-12;

  // x = sum_{|lam| > cutoff} (v^T b / lam) v
  std::vector<double> x(b.size(), 0.0);
  for (std::size_t j = 0; j < eg.values.size(); ++j) {
    if (std::fabs(eg.values[j]) <= cutoff) continue;
    const std::vector<double> vj = eg.vectors.column(j);
    const double coef = kernels::dot(vj.data(), b.data(), b.size()) / eg.values[j];
    kernels::axpy(coef, vj.data(), x.data(), x.size());
  }
  return x;
}

double distance_to_column_span(const Matrix& m, std::span<const double> point) {
  const std::size_t rows = m.rows();
  if (rows != point.size()) {
    throw Error(Error::Kind::invalid_argument, "distance_to_column_span: shape mismatch");
  }
  std::vector<double> resid(point.begin(), point.end());
  std::vector<std::vector<double>> basis;
  basis.reserve(m.cols());

  for (std::size_t j = 0; j < m.cols(); ++j) {
    std::vector<double> col = m.column(j);
    const double n0 = norm(col);
    if (n0 == 0.0) continue;
    // Two MGS passes keep the basis orthogonal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) {
        const double proj = kernels::dot(q.data(), col.data(), rows);
        kernels::axpy(-proj, q.data(), col.data(), rows);
      }
    }
    const double n1 = norm(col);
    if (n1 <= 1e-12 * n0) continue;  // linearly dependent column
    kernels::scale(col.data(), 1.0 / n1, rows);
    const double proj = kernels::dot(col.data(), resid.data(), rows);
    kernels::axpy(-proj, col.data(), resid.data(), rows);
    basis.push_back(std::move(col));
  }
  // One cleanup pass over the residual.
  for (const auto& q : basis) {
    const double proj = kernels::dot(q.data(), resid.data(), rows);
    kernels::axpy(-proj, q.data(), resid.data(), rows);
  }
  return norm(resid);
}

}  // namespace tomo
