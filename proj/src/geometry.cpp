#include "tomo/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

PointCloud::PointCloud(Matrix points) : points_(std::move(points)) {
  if (points_.rows() == 0 || points_.cols() == 0) {
    throw Error(Error::Kind::invalid_argument, "PointCloud: empty");
  }
  if (!points_.all_finite()) {
    throw Error(Error::Kind::invalid_argument, "PointCloud: non-finite point");
  }
}

EllipsoidSpec::EllipsoidSpec(std::vector<double> radii) : radii_(std::move(radii)) {
  if (radii_.empty()) {
    throw Error(Error::Kind::invalid_argument, "EllipsoidSpec: empty radii");
  }
  for (double r : radii_) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(Error::Kind::invalid_argument, "EllipsoidSpec: radii must be positive");
    }
  }
}

namespace {

WidthEstimate summarize(const std::vector<double>& samples) {
  WidthEstimate est;
  est.num_gaussians = samples.size();
  est.mean = kernels::sum(samples.data(), samples.size()) / samples.size();
  double ss = 0.0;
  for (double v : samples) ss += (v - est.mean) * (v - est.mean);
  const double var = samples.size() > 1 ? ss / (samples.size() - 1) : 0.0;
  est.std_error = std::sqrt(var / samples.size());
  return est;
}

double width_sample(const PointCloud& cloud, std::span<const double> g) {
  const Matrix& pts = cloud.points();
  double hi = kernels::dot(pts.row(0), g.data(), pts.cols());
  double lo = hi;
  for (std::size_t i = 1; i < pts.rows(); ++i) {
    const double v = kernels::dot(pts.row(i), g.data(), pts.cols());
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  return 0.5 * (hi - lo);
}

}  // namespace

WidthEstimate gaussian_width_mc(const PointCloud& cloud, RngStream& rng,
                                std::size_t num_gaussians) {
  const PointCloud* one[] = {&cloud};
  return gaussian_width_mc_coupled(one, rng, num_gaussians)[0];
}

std::vector<WidthEstimate> gaussian_width_mc_coupled(
    std::span<const PointCloud* const> clouds, RngStream& rng,
    std::size_t num_gaussians) {
  if (clouds.empty()) {
    throw Error(Error::Kind::invalid_argument, "gaussian_width_mc: no clouds");
  }
  if (num_gaussians < 2) {
    throw Error(Error::Kind::invalid_argument,
                "gaussian_width_mc: need at least 2 Gaussian draws");
  }
  const std::size_t dim = clouds[0]->dim();
  for (const PointCloud* c : clouds) {
    if (c->dim() != dim) {
      throw Error(Error::Kind::invalid_argument, "gaussian_width_mc: dimension mismatch");
    }
  }

  std::vector<std::vector<double>> samples(clouds.size());
  for (auto& s : samples) s.reserve(num_gaussians);
  std::vector<double> g(dim);
  for (std::size_t k = 0; k < num_gaussians; ++k) {
    for (double& v : g) v = rng.next_gaussian();
    for (std::size_t c = 0; c < clouds.size(); ++c) {
      samples[c].push_back(width_sample(*clouds[c], g));
    }
  }

  std::vector<WidthEstimate> out;
  out.reserve(clouds.size());
  for (const auto& s : samples) out.push_back(summarize(s));
  return out;
}

std::pair<double, double> ellipsoid_width_sq_bounds(const EllipsoidSpec& e) {
  double sum_r2 = 0.0;
  for (double r : e.radii()) sum_r2 += r * r;
  return {(2.0 / M_PI) * sum_r2, sum_r2};
}

WidthEstimate ellipsoid_width_mc(const EllipsoidSpec& e, RngStream& rng,
                                 std::size_t num_gaussians) {
  if (num_gaussians < 2) {
    throw Error(Error::Kind::invalid_argument,
                "ellipsoid_width_mc: need at least 2 Gaussian draws");
  }
  std::vector<double> samples;
  samples.reserve(num_gaussians);
  const auto radii = e.radii();
  for (std::size_t k = 0; k < num_gaussians; ++k) {
    double acc = 0.0;
    for (double r : radii) {
      const double gi = rng.next_gaussian();
      acc += gi * gi * r * r;
    }
    samples.push_back(std::sqrt(acc));
  }
  return summarize(samples);
}

PointCloud project_onto_sphere(const PointCloud& cloud, std::span<const double> center) {
  if (center.size() != cloud.dim()) {
    throw Error(Error::Kind::invalid_argument, "project_onto_sphere: center dimension");
  }
  Matrix out(cloud.size(), cloud.dim());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double* p = cloud.points().row(i);
    double* q = out.row(i);
    double n2 = 0.0;
    for (std::size_t j = 0; j < cloud.dim(); ++j) {
      q[j] = p[j] - center[j];
      n2 += q[j] * q[j];
    }
    if (n2 == 0.0) {
      throw Error(Error::Kind::invalid_argument,
                  "project_onto_sphere: point coincides with center");
    }
    kernels::scale(q, 1.0 / std::sqrt(n2), cloud.dim());
  }
  return PointCloud(std::move(out));
}

double local_angular_dimension_bound(const Spectrum& spectrum, double epsilon, double R) {
  if (!(epsilon > 0.0) || !(R > 0.0)) {
    throw Error(Error::Kind::invalid_argument,
                "local_angular_dimension_bound: epsilon and R must be positive");
  }
  double acc = 0.0;
  for (double lam : spectrum.values()) {
    const double r2 = 2.0 * epsilon / lam;
    acc += r2 / (R * R + r2);
  }
  return acc;
}

double escape_probability_bound(std::size_t k, double width) {
  if (k == 0) {
    throw Error(Error::Kind::invalid_argument, "escape_probability_bound: k >= 1");
  }
  if (width < 0.0) {
    throw Error(Error::Kind::invalid_argument, "escape_probability_bound: width >= 0");
  }
  const double kd = static_cast<double>(k);
  if (!(kd > width * width)) return 0.0;  // theorem precondition fails
  const double margin = kd / std::sqrt(kd + 1.0) - width;
  const double p = 1.0 - 3.5 * std::exp(-margin * margin / 18.0);
  return std::clamp(p, 0.0, 1.0);
}

double threshold_upper_bound(const Spectrum& spectrum, double epsilon, double R,
                             std::size_t dim) {
  if (spectrum.size() != dim) {
    throw Error(Error::Kind::invalid_argument, "threshold_upper_bound: spectrum length != D");
  }
  return static_cast<double>(dim) - local_angular_dimension_bound(spectrum, epsilon, R);
}

}  // namespace tomo
