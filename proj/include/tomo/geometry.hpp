#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tomo/matrix.hpp"
#include "tomo/rng.hpp"
#include "tomo/spectrum.hpp"

namespace tomo {

// Finite sample standing in for a subset of R^D; one point per row.
class PointCloud {
 public:
  explicit PointCloud(Matrix points);

  std::size_t dim() const { return points_.cols(); }
  std::size_t size() const { return points_.rows(); }
  const Matrix& points() const { return points_; }

 private:
  Matrix points_;
};

// Axis-aligned ellipsoid given by its per-axis radii (all > 0).
class EllipsoidSpec {
 public:
  explicit EllipsoidSpec(std::vector<double> radii);

  std::size_t dim() const { return radii_.size(); }
  std::span<const double> radii() const { return radii_; }

 private:
  std::vector<double> radii_;
};

struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t num_gaussians = 0;
};

// Monte Carlo Gaussian width of a finite point cloud using the two-sided
// definition: per draw g, the sample is (1/2) * (max_x <g,x> - min_y <g,y>).
WidthEstimate gaussian_width_mc(const PointCloud& cloud, RngStream& rng,
                                std::size_t num_gaussians);

// Common-random-numbers variant: evaluates several clouds against the same
// Gaussian draws, which makes width comparisons between nested clouds exact
// per draw.
std::vector<WidthEstimate> gaussian_width_mc_coupled(
    std::span<const PointCloud* const> clouds, RngStream& rng,
    std::size_t num_gaussians);

// (lower, upper) bounds on the squared Gaussian width of the ellipsoid:
// (2/pi) * sum r_j^2 <= w^2 <= sum r_j^2. The lower constant follows the
// proof (the stated lemma's sqrt(2/pi) is inconsistent with its own 1-D
// case).
std::pair<double, double> ellipsoid_width_sq_bounds(const EllipsoidSpec& e);

// Monte Carlo width of the ellipsoid via the exact support function
// sup_{x in E} <g,x> = sqrt(sum_i g_i^2 r_i^2); no point cloud involved.
WidthEstimate ellipsoid_width_mc(const EllipsoidSpec& e, RngStream& rng,
                                 std::size_t num_gaussians);

// Radial projection of a cloud onto the unit sphere centered at `center`.
// Throws if a point coincides with the center.
PointCloud project_onto_sphere(const PointCloud& cloud, std::span<const double> center);

// Lower bound on the local angular dimension of the quadratic sublevel set
// S(epsilon) about a point at distance R from the minimum:
// sum_i r_i^2 / (R^2 + r_i^2) with r_i = sqrt(2*epsilon/lambda_i).
double local_angular_dimension_bound(const Spectrum& spectrum, double epsilon, double R);

// Escape-theorem probability bound for a k-codimension subspace missing a
// set of width `width` on the unit sphere:
// max(0, 1 - 3.5*exp(-(k/sqrt(k+1) - width)^2 / 18)) when k > width^2,
// and 0 outside the theorem's regime. Clamped to [0, 1].
double escape_probability_bound(std::size_t k, double width);

// Upper bound on the threshold training dimension of S(epsilon):
// D - local_angular_dimension_bound(spectrum, epsilon, R).
double threshold_upper_bound(const Spectrum& spectrum, double epsilon, double R,
                             std::size_t dim);

}  // namespace tomo
