#include "tomo/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tomo/error.hpp"
#include "tomo/linalg.hpp"

namespace tomo {

TrajectoryMatrix trajectory_from_snapshots(const std::vector<FlatParams>& snapshots,
                                           bool deltas) {
  if (snapshots.size() < 2) {
    throw Error(Error::Kind::invalid_argument,
                "trajectory_from_snapshots: need at least two snapshots");
  }
  const std::size_t D = snapshots[0].dim();
  const std::size_t T = deltas ? snapshots.size() - 1 : snapshots.size();
  TrajectoryMatrix traj;
  traj.columns = Matrix(D, T);
  for (std::size_t c = 0; c < T; ++c) {
    const std::vector<double>& hi = deltas ? snapshots[c + 1].w : snapshots[c].w;
    if (hi.size() != D) {
      throw Error(Error::Kind::invalid_argument,
                  "trajectory_from_snapshots: inconsistent snapshot sizes");
    }
    for (std::size_t i = 0; i < D; ++i) {
      traj.columns(i, c) = deltas ? hi[i] - snapshots[c].w[i] : hi[i];
    }
  }
  return traj;
}

LotterySubspace build_lottery_subspace(const TrajectoryMatrix& traj, std::size_t d,
                                       FlatParams rewind) {
  if (d == 0 || d > traj.steps()) {
    throw Error(Error::Kind::invalid_argument,
                "build_lottery_subspace: d must be in [1, T]");
  }
  if (rewind.dim() != traj.ambient_dim()) {
    throw Error(Error::Kind::invalid_argument,
                "build_lottery_subspace: rewind dimension mismatch");
  }
  TopKSvd svd = top_k_svd(traj.columns, d);
  LotterySubspace ls;
  ls.u = std::move(svd.u);
  ls.singular_values = std::move(svd.singular_values);
  ls.rewind = std::move(rewind);
  return ls;
}

SparsityMask lottery_ticket_mask(const FlatParams& trained, double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw Error(Error::Kind::invalid_argument,
                "lottery_ticket_mask: fraction must be in (0, 1]");
  }
  const std::size_t D = trained.dim();
  const std::size_t kept =
      std::min<std::size_t>(D, static_cast<std::size_t>(
                                   std::ceil(keep_fraction * static_cast<double>(D))));

  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), 0);
  // Sort by magnitude descending, ties toward the lower flat index.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::fabs(trained.w[a]);
    const double mb = std::fabs(trained.w[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });

  SparsityMask mask;
  mask.keep.assign(D, 0);
  mask.kept = kept;
  for (std::size_t i = 0; i < kept; ++i) mask.keep[order[i]] = 1;
  return mask;
}

std::vector<std::size_t> layer_kept_counts(const MlpArchitecture& arch,
                                           const SparsityMask& mask) {
  if (mask.keep.size() != arch.param_count()) {
    throw Error(Error::Kind::invalid_argument, "layer_kept_counts: mask length mismatch");
  }
  std::vector<std::size_t> counts;
  for (const auto& s : arch.layer_spans()) {
    std::size_t c = 0;
    for (std::size_t i = s.weights_begin; i < s.end; ++i) c += mask.keep[i];
    counts.push_back(c);
  }
  return counts;
}

bool has_layer_collapse(const MlpArchitecture& arch, const SparsityMask& mask) {
  for (std::size_t c : layer_kept_counts(arch, mask)) {
    if (c == 0) return true;
  }
  return false;
}

double compression_ratio(std::size_t full_dim, std::size_t d) {
  if (d == 0) {
    throw Error(Error::Kind::invalid_argument, "compression_ratio: d must be >= 1");
  }
  return static_cast<double>(full_dim) / static_cast<double>(d);
}

std::vector<std::pair<std::size_t, double>> spectra_report(const LotterySubspace& ls) {
  std::vector<std::pair<std::size_t, double>> rows;
  rows.reserve(ls.singular_values.size());
  for (std::size_t i = 0; i < ls.singular_values.size(); ++i) {
    rows.emplace_back(i + 1, ls.singular_values[i]);
  }
  return rows;
}

}  // namespace tomo
