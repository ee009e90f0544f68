#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomo/matrix.hpp"

namespace tomo {

// Eigendecomposition of a symmetric matrix, eigenvalues descending,
// eigenvectors as columns of `vectors`.
struct SymEig {
  std::vector<double> values;
  Matrix vectors;
};

// Cyclic Jacobi. Input must be square; symmetry is the caller's contract.
SymEig eigh(const Matrix& s);

struct TopKSvd {
  Matrix u;                            // rows x k, orthonormal columns
  std::vector<double> singular_values;  // length k, non-increasing, >= 0
};

// Top-k left singular vectors and singular values. Goes through the Gram
// matrix on the smaller side, which is exact enough for the tall-thin
// (trajectory) and small square matrices this library sees. Signs are
// canonicalized so repeated calls and different k agree on shared columns.
TopKSvd top_k_svd(const Matrix& m, std::size_t k);

// Minimum-norm least-squares solution of s*x = b for symmetric s
// (pseudo-inverse semantics, so singular systems are fine). Throws
// Error::Kind::not_symmetric if s deviates from symmetry by more than 1e-10
// relative to its largest entry.
std::vector<double> solve_symmetric(const Matrix& s, std::span<const double> b);

// Distance from `point` to the column span of `m`, i.e. the residual norm of
// the least-squares projection. Uses modified Gram-Schmidt with
// reorthogonalization; rank-deficient inputs are fine.
double distance_to_column_span(const Matrix& m, std::span<const double> point);

}  // namespace tomo
