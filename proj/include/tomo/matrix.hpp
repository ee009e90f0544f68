#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomo/rng.hpp"

namespace tomo {

// Dense row-major matrix of doubles. Rows are contiguous, so row(i) hands a
// pointer straight to the kernel layer.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool all_finite() const;

  // Frobenius norm squared.
  double frobenius_sq() const;

  std::vector<double> column(std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// rows x cols matrix of i.i.d. standard normals drawn from the stream.
Matrix gaussian_matrix(RngStream& rng, std::size_t rows, std::size_t cols);

// Rescale every column to unit Euclidean norm. Throws Error::Kind::
// degenerate_basis on a zero column.
Matrix normalize_columns(const Matrix& m);

// Euclidean column norms in one row-major pass.
std::vector<double> column_norms(const Matrix& m);

// y = m * x         (length rows)
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

// y = m^T * x       (length cols)
std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> x);

double norm(std::span<const double> x);

}  // namespace tomo
