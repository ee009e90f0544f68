#include "tomo/matrix.hpp"

#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

double Matrix::frobenius_sq() const {
  return kernels::sumsq(data_.data(), data_.size());
}

std::vector<double> Matrix::column(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Matrix gaussian_matrix(RngStream& rng, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) {
    throw Error(Error::Kind::invalid_argument, "gaussian_matrix: empty shape");
  }
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.next_gaussian();
  return m;
}

std::vector<double> column_norms(const Matrix& m) {
  std::vector<double> acc(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) acc[j] += r[j] * r[j];
  }
  for (double& v : acc) v = std::sqrt(v);
  return acc;
}

Matrix normalize_columns(const Matrix& m) {
  const std::vector<double> norms = column_norms(m);
  for (std::size_t j = 0; j < norms.size(); ++j) {
    if (norms[j] == 0.0) {
      throw Error(Error::Kind::degenerate_basis,
                  "normalize_columns: column " + std::to_string(j) + " has zero norm");
    }
  }
  Matrix out = m;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double* r = out.row(i);
    for (std::size_t j = 0; j < out.cols(); ++j) r[j] /= norms[j];
  }
  return out;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  std::vector<double> y(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    y[i] = kernels::dot(m.row(i), x.data(), m.cols());
  }
  return y;
}

std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> x) {
  std::vector<double> y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    kernels::axpy(x[i], m.row(i), y.data(), m.cols());
  }
  return y;
}

double norm(std::span<const double> x) {
  return std::sqrt(kernels::sumsq(x.data(), x.size()));
}

}  // namespace tomo
