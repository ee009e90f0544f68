#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tomo {

enum class Metric { loss, accuracy };

std::string metric_name(Metric m);

// One constrained-training (or exact-solve) run inside a grid cell. Success
// against any threshold is recomputable from the best values alone, which is
// what keeps the per-run epsilon-nesting invariant automatic.
struct RunResult {
  std::uint64_t stream_id = 0;
  double best_loss = 0.0;
  double best_acc = 0.0;
  bool has_acc = false;  // quadratic runs record loss only
};

bool run_succeeds(const RunResult& r, Metric m, double threshold);

// Empirical success probabilities over a (burn-in t) x (training dimension d)
// lattice, evaluated against loss sublevel and accuracy superlevel
// thresholds.
class SuccessGrid {
 public:
  SuccessGrid() = default;
  SuccessGrid(std::vector<int> t_values, std::vector<std::size_t> d_values,
              std::vector<double> loss_thresholds,
              std::vector<double> acc_thresholds);

  const std::vector<int>& t_values() const { return t_values_; }
  const std::vector<std::size_t>& d_values() const { return d_values_; }
  const std::vector<double>& thresholds(Metric m) const;

  void set_cell(int t, std::size_t d, std::vector<RunResult> results);
  const std::vector<RunResult>& cell(int t, std::size_t d) const;

  std::size_t cell_runs(int t, std::size_t d) const;
  std::size_t cell_successes(int t, std::size_t d, Metric m, double threshold) const;
  double p_success(int t, std::size_t d, Metric m, double threshold) const;

 private:
  std::size_t index(int t, std::size_t d) const;

  std::vector<int> t_values_;
  std::vector<std::size_t> d_values_;
  std::vector<double> loss_thresholds_;
  std::vector<double> acc_thresholds_;
  std::vector<std::vector<RunResult>> cells_;
};

struct ThresholdPoint {
  double threshold = 0.0;
  std::optional<std::size_t> d_star;  // empty = unreached
};

// d*(threshold) extracted at criterion 1-delta for one burn-in time t.
struct ThresholdCurve {
  Metric metric = Metric::loss;
  int t = 0;
  double delta = 0.1;
  std::vector<ThresholdPoint> points;
};

// For each threshold, the minimal measured d with empirical success
// probability >= 1-delta; unreached if no measured d qualifies.
ThresholdCurve extract_threshold(const SuccessGrid& grid, double delta, int t,
                                 Metric metric);

struct LabeledCurve {
  std::string label;
  int t = 0;
  ThresholdCurve curve;
};

struct ComparisonRow {
  double threshold = 0.0;
  // Methods ordered by ascending d*; unreached methods rank last.
  std::vector<std::pair<std::string, std::optional<std::size_t>>> ranking;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  // Human-readable notes where a longer burn-in had a strictly larger d*
  // than a shorter one at the same threshold. Reported, never asserted.
  std::vector<std::string> burn_in_violations;
};

// Curves must share their threshold axis and metric.
ComparisonReport compare_methods(std::span<const LabeledCurve> curves);

}  // namespace tomo
