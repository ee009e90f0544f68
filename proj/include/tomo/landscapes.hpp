#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomo/matrix.hpp"
#include "tomo/rng.hpp"
#include "tomo/spectrum.hpp"
#include "tomo/success_grid.hpp"

namespace tomo {

// L(w) = (1/2) w^T H w with H diagonal in the spectrum's basis.
struct QuadraticWell {
  Spectrum spectrum;

  std::size_t dim() const { return spectrum.size(); }
};

// Affine training chart w(theta) = A theta + offset; A has unit-norm columns.
struct SubspaceBasis {
  Matrix a;                    // D x d
  std::vector<double> offset;  // length D

  std::size_t ambient_dim() const { return a.rows(); }
  std::size_t dim() const { return a.cols(); }
};

// Random n-dimensional affine target subspace with orthonormal basis.
struct AffineTarget {
  Matrix basis;                // D x n, orthonormal columns
  std::vector<double> offset;  // length D

  std::size_t ambient_dim() const { return basis.rows(); }
  std::size_t dim() const { return basis.cols(); }
};

double well_loss(const QuadraticWell& well, std::span<const double> w);

struct SubspaceMinimum {
  std::vector<double> theta;
  double loss = 0.0;
};

// Closed-form minimizer of the well restricted to the chart: solves
// (A^T H A) theta = -A^T H offset with pseudo-inverse semantics.
SubspaceMinimum min_loss_in_subspace_exact(const QuadraticWell& well,
                                           const SubspaceBasis& basis);

// Uniformly random direction scaled to norm exactly R.
std::vector<double> sample_offset_at_distance(std::size_t dim, double R, RngStream& rng);

// Random unit-column Gaussian chart at the given offset.
SubspaceBasis sample_subspace_basis(std::size_t ambient_dim, std::size_t d,
                                    std::vector<double> offset, RngStream& rng);

// Random orthonormal affine target (basis from the QR of a Gaussian matrix).
AffineTarget sample_affine_target(std::size_t ambient_dim, std::size_t n,
                                  std::vector<double> offset, RngStream& rng);

// Exact minimum Euclidean distance between the two affine subspaces, via
// least squares on the joint system [A, -B] z = offset difference. Zero
// (within roundoff) whenever d + n >= D.
double affine_target_distance(const AffineTarget& target, const SubspaceBasis& basis);

// One grid-cell run of the quadratic experiment: fresh offset at distance R,
// fresh chart, exact restricted minimum. Stream identifies the run.
RunResult quadratic_cell_run(const QuadraticWell& well, double R, std::size_t d,
                             RngStream stream);

// Success probabilities P_s(d, epsilon) for the quadratic well at distance R,
// with fresh offset and basis per (d, run). Cell streams are derived from the
// rng's identity and the cell coordinates, so results do not depend on
// evaluation order.
SuccessGrid quadratic_success_grid(const QuadraticWell& well, double R,
                                   const std::vector<std::size_t>& dims,
                                   const std::vector<double>& epsilons,
                                   std::size_t runs, const RngStream& rng);

}  // namespace tomo
