#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tomo/matrix.hpp"
#include "tomo/neural.hpp"

namespace tomo {

// First-order (tangent-kernel) expansion of the network around a reference
// point: logits(w, x) = logits(w_ref, x) + J(x) (w - w_ref). The per-example
// logit Jacobian is materialized densely, so this is strictly a desk-scale
// tool; construction refuses to allocate past `max_bytes`.
class LinearizedModel {
 public:
  LinearizedModel(const MlpArchitecture& arch, FlatParams w_ref, const Dataset& data,
                  std::size_t max_bytes = std::size_t{1} << 30);

  std::size_t param_dim() const { return w_ref_.dim(); }
  std::size_t num_examples() const { return num_examples_; }
  std::size_t num_classes() const { return num_classes_; }
  const FlatParams& reference_point() const { return w_ref_; }
  const std::vector<double>& reference_logits() const { return ref_logits_; }
  const Matrix& jacobian() const { return jacobian_; }

  // Linearized logits for example n at parameters w.
  std::vector<double> logits(std::span<const double> w, std::size_t n) const;

  // Mean cross-entropy of the linearized logits (convex in w).
  double loss(std::span<const double> w, const Dataset& data) const;

 private:
  FlatParams w_ref_;
  std::vector<double> ref_logits_;  // N*C, row-major per example
  Matrix jacobian_;                 // (N*C) x D
  std::size_t num_examples_ = 0;
  std::size_t num_classes_ = 0;
};

LinearizedModel linearize(const MlpArchitecture& arch, const FlatParams& w_opt,
                          const Dataset& data,
                          std::size_t max_bytes = std::size_t{1} << 30);

// Training objective over the linearized logits; plugs into
// train_objective_in_subspace like the real network.
std::unique_ptr<BatchObjective> make_linearized_objective(const LinearizedModel& model,
                                                          const Dataset& data);

}  // namespace tomo
