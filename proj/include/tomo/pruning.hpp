#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tomo/matrix.hpp"
#include "tomo/neural.hpp"

namespace tomo {

// Directions traveled during a full training run: column i is the step delta
// w_{i+1} - w_i (or raw snapshots when deltas=false, kept for sensitivity
// checks).
struct TrajectoryMatrix {
  Matrix columns;  // D x T

  std::size_t ambient_dim() const { return columns.rows(); }
  std::size_t steps() const { return columns.cols(); }
};

TrajectoryMatrix trajectory_from_snapshots(const std::vector<FlatParams>& snapshots,
                                           bool deltas = true);

// Chart spanned by the top-d left singular vectors of the trajectory,
// offset at the rewind point. Nested by construction: the first columns of
// U_{d+1} are U_d.
struct LotterySubspace {
  Matrix u;                             // D x d, orthonormal columns
  std::vector<double> singular_values;  // descending
  FlatParams rewind;

  SubspaceBasis basis() const { return SubspaceBasis{u, rewind.w}; }
};

LotterySubspace build_lottery_subspace(const TrajectoryMatrix& traj, std::size_t d,
                                       FlatParams rewind);

// Global magnitude pruning over weights and biases jointly; keeps the
// top-ceil(fraction*D) entries by |w|, ties broken toward the lower flat
// index.
struct SparsityMask {
  std::vector<std::uint8_t> keep;
  std::size_t kept = 0;
};

SparsityMask lottery_ticket_mask(const FlatParams& trained, double keep_fraction);

// Kept parameters per layer (weights and biases together); a zero entry at
// high compression is the layer-collapse pathology.
std::vector<std::size_t> layer_kept_counts(const MlpArchitecture& arch,
                                           const SparsityMask& mask);
bool has_layer_collapse(const MlpArchitecture& arch, const SparsityMask& mask);

// Parameters in the full model over the restricted training dimension.
double compression_ratio(std::size_t full_dim, std::size_t d);

// (dimension index, singular value) rows, descending, CSV-ready.
std::vector<std::pair<std::size_t, double>> spectra_report(const LotterySubspace& ls);

}  // namespace tomo
