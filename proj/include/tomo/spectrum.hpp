#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tomo/rng.hpp"

namespace tomo {

// Ordered Hessian eigenvalue spectrum of a quadratic well. Always strictly
// positive and sorted non-decreasing; Gaussian subspace sampling is rotation
// invariant, so the diagonal representation loses nothing.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> eigenvalues);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

// num_small eigenvalues at lambda_small, the rest at lambda_large.
Spectrum make_bimodal_spectrum(std::size_t dim, std::size_t num_small,
                               double lambda_small, double lambda_large);

// dim eigenvalues log-uniform on [lambda_min, lambda_max], sorted.
Spectrum make_bulk_spectrum(std::size_t dim, double lambda_min, double lambda_max,
                            RngStream& rng);

}  // namespace tomo
