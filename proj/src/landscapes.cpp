#include "tomo/landscapes.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"
#include "tomo/linalg.hpp"

namespace tomo {

Spectrum::Spectrum(std::vector<double> eigenvalues) : values_(std::move(eigenvalues)) {
  if (values_.empty()) {
    throw Error(Error::Kind::invalid_argument, "Spectrum: empty");
  }
  for (double v : values_) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(Error::Kind::invalid_argument, "Spectrum: eigenvalues must be positive");
    }
  }
  std::sort(values_.begin(), values_.end());
}

Spectrum make_bimodal_spectrum(std::size_t dim, std::size_t num_small,
                               double lambda_small, double lambda_large) {
  if (dim == 0 || num_small > dim) {
    throw Error(Error::Kind::invalid_argument, "make_bimodal_spectrum: bad counts");
  }
  if (!(lambda_small > 0.0) || !(lambda_small < lambda_large)) {
    throw Error(Error::Kind::invalid_argument,
                "make_bimodal_spectrum: need 0 < lambda_small < lambda_large");
  }
  std::vector<double> ev(dim, lambda_large);
  std::fill(ev.begin(), ev.begin() + num_small, lambda_small);
  return Spectrum(std::move(ev));
}

Spectrum make_bulk_spectrum(std::size_t dim, double lambda_min, double lambda_max,
                            RngStream& rng) {
  if (dim == 0 || !(lambda_min > 0.0) || !(lambda_min <= lambda_max)) {
    throw Error(Error::Kind::invalid_argument, "make_bulk_spectrum: bad range");
  }
  const double lo = std::log(lambda_min);
  const double hi = std::log(lambda_max);
  std::vector<double> ev(dim);
  for (double& v : ev) v = std::exp(lo + (hi - lo) * rng.next_unit());
  return Spectrum(std::move(ev));
}

double well_loss(const QuadraticWell& well, std::span<const double> w) {
  if (w.size() != well.dim()) {
    throw Error(Error::Kind::invalid_argument, "well_loss: dimension mismatch");
  }
  double acc = 0.0;
  const auto lam = well.spectrum.values();
  for (std::size_t i = 0; i < w.size(); ++i) acc += lam[i] * w[i] * w[i];
  return 0.5 * acc;
}

SubspaceMinimum min_loss_in_subspace_exact(const QuadraticWell& well,
                                           const SubspaceBasis& basis) {
  const std::size_t D = well.dim();
  const std::size_t d = basis.dim();
  if (basis.ambient_dim() != D || basis.offset.size() != D) {
    throw Error(Error::Kind::invalid_argument,
                "min_loss_in_subspace_exact: dimension mismatch");
  }

  SubspaceMinimum out;
  if (d == 0) {
    out.loss = well_loss(well, basis.offset);
    return out;
  }

  // Row-scale A by the spectrum: (H A)[i,:] = lambda_i A[i,:].
  const auto lam = well.spectrum.values();
  Matrix ha = basis.a;
  for (std::size_t i = 0; i < D; ++i) {
    kernels::scale(ha.row(i), lam[i], d);
  }

  // Normal system (A^T H A) theta = -A^T H offset.
  Matrix s(d, d);
  std::vector<double> b(d, 0.0);
  for (std::size_t i = 0; i < D; ++i) {
    const double* arow = basis.a.row(i);
    const double* harow = ha.row(i);
    for (std::size_t p = 0; p < d; ++p) {
      kernels::axpy(arow[p], harow, s.row(p), d);
    }
    kernels::axpy(-basis.offset[i], harow, b.data(), d);
  }
  // Enforce exact symmetry lost to accumulation order.
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p + 1; q < d; ++q) {
      const double avg = 0.5 * (s(p, q) + s(q, p));
      s(p, q) = avg;
      s(q, p) = avg;
    }
  }

  out.theta = solve_symmetric(s, b);
  std::vector<double> w = matvec(basis.a, out.theta);
  for (std::size_t i = 0; i < D; ++i) w[i] += basis.offset[i];
  out.loss = well_loss(well, w);
  return out;
}

std::vector<double> sample_offset_at_distance(std::size_t dim, double R, RngStream& rng) {
  if (!(R > 0.0)) {
    throw Error(Error::Kind::invalid_argument, "sample_offset_at_distance: R > 0");
  }
  std::vector<double> v(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : v) {
      x = rng.next_gaussian();
      n2 += x * x;
    }
  } while (n2 == 0.0);
  kernels::scale(v.data(), R / std::sqrt(n2), dim);
  return v;
}

SubspaceBasis sample_subspace_basis(std::size_t ambient_dim, std::size_t d,
                                    std::vector<double> offset, RngStream& rng) {
  if (offset.size() != ambient_dim) {
    throw Error(Error::Kind::invalid_argument, "sample_subspace_basis: offset dimension");
  }
  SubspaceBasis basis;
  basis.offset = std::move(offset);
  basis.a = (d == 0) ? Matrix(ambient_dim, 0)
                     : normalize_columns(gaussian_matrix(rng, ambient_dim, d));
  return basis;
}

AffineTarget sample_affine_target(std::size_t ambient_dim, std::size_t n,
                                  std::vector<double> offset, RngStream& rng) {
  if (n == 0 || n >= ambient_dim) {
    throw Error(Error::Kind::invalid_argument, "sample_affine_target: need 0 < n < D");
  }
  if (offset.size() != ambient_dim) {
    throw Error(Error::Kind::invalid_argument, "sample_affine_target: offset dimension");
  }
  Matrix g = gaussian_matrix(rng, ambient_dim, n);
  // Orthonormalize columns (two-pass MGS).
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> col = g.column(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t c = 0; c < j; ++c) {
        const std::vector<double> qc = g.column(c);
        const double proj = kernels::dot(qc.data(), col.data(), ambient_dim);
        kernels::axpy(-proj, qc.data(), col.data(), ambient_dim);
      }
    }
    const double nrm = norm(col);
    if (nrm < 1e-12) {
      throw Error(Error::Kind::degenerate_basis, "sample_affine_target: rank deficient");
    }
    for (std::size_t i = 0; i < ambient_dim; ++i) g(i, j) = col[i] / nrm;
  }
  AffineTarget target;
  target.basis = std::move(g);
  target.offset = std::move(offset);
  return target;
}

double affine_target_distance(const AffineTarget& target, const SubspaceBasis& basis) {
  const std::size_t D = target.ambient_dim();
  if (basis.ambient_dim() != D) {
    throw Error(Error::Kind::invalid_argument, "affine_target_distance: dimension mismatch");
  }
  // min_{theta, phi} || A theta - B phi - (c - w_t) ||: joint least squares.
  Matrix joint(D, basis.dim() + target.dim());
  for (std::size_t i = 0; i < D; ++i) {
    double* row = joint.row(i);
    const double* arow = basis.a.row(i);
    for (std::size_t j = 0; j < basis.dim(); ++j) row[j] = arow[j];
    const double* brow = target.basis.row(i);
    for (std::size_t j = 0; j < target.dim(); ++j) row[basis.dim() + j] = -brow[j];
  }
  std::vector<double> rhs(D);
  for (std::size_t i = 0; i < D; ++i) rhs[i] = target.offset[i] - basis.offset[i];
  return distance_to_column_span(joint, rhs);
}

RunResult quadratic_cell_run(const QuadraticWell& well, double R, std::size_t d,
                             RngStream stream) {
  RunResult rr;
  rr.stream_id = stream.stream_id();
  std::vector<double> offset = sample_offset_at_distance(well.dim(), R, stream);
  const SubspaceBasis basis = sample_subspace_basis(well.dim(), d, std::move(offset), stream);
  rr.best_loss = min_loss_in_subspace_exact(well, basis).loss;
  rr.has_acc = false;
  rr.best_acc = 0.0;
  return rr;
}

SuccessGrid quadratic_success_grid(const QuadraticWell& well, double R,
                                   const std::vector<std::size_t>& dims,
                                   const std::vector<double>& epsilons,
                                   std::size_t runs, const RngStream& rng) {
  if (dims.empty() || epsilons.empty() || runs == 0) {
    throw Error(Error::Kind::invalid_argument, "quadratic_success_grid: empty grid");
  }
  std::vector<std::size_t> sorted_dims = dims;
  std::sort(sorted_dims.begin(), sorted_dims.end());

  SuccessGrid grid({0}, sorted_dims, epsilons, {});
  for (std::size_t d : sorted_dims) {
    std::vector<RunResult> cell;
    cell.reserve(runs);
    for (std::size_t run = 0; run < runs; ++run) {
      const std::uint64_t sid = RngStream::derive_stream_id(
          "quadratic", {rng.stream_id(), d, run,
                        static_cast<std::uint64_t>(std::llround(R * 1e6))});
      cell.push_back(quadratic_cell_run(well, R, d, RngStream(rng.master_seed(), sid)));
    }
    grid.set_cell(0, d, std::move(cell));
  }
  return grid;
}

}  // namespace tomo
