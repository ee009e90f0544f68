#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tomo/config.hpp"
#include "tomo/geometry.hpp"
#include "tomo/success_grid.hpp"

namespace tomo {

// One sweep block: a success grid plus its extracted threshold curves.
// Quadratic sweeps produce one block per radius; lottery produces one per
// method kind; nn-sweep produces a single block covering all burn-in times.
struct SweepBlock {
  std::string label;        // "" for the root block, subdirectory name otherwise
  SuccessGrid grid;
  std::vector<LabeledCurve> curves;
};

struct WidthCaseResult {
  std::size_t index = 0;
  std::size_t dim = 0;
  WidthEstimate estimate;
  double lower = 0.0;
  double upper = 0.0;
  bool within = false;  // mean^2 inside [lower, upper] with 3-std_error slack
};

struct AffineCellResult {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t trials = 0;
  double mean_distance = 0.0;
  double predictor = 0.0;  // sqrt(max(D-n-d,0))/sqrt(D)
};

struct AffineFit {
  double slope = 0.0;
  double r_squared = 0.0;
  double ratio_spread = 0.0;  // max/min ratio over cells with predictor > 0, minus 1
};

struct SweepResult {
  std::vector<SweepBlock> blocks;
  std::vector<WidthCaseResult> width_cases;
  std::vector<AffineCellResult> affine_cells;
  AffineFit affine_fit;
  std::vector<std::string> files_written;
};

// Execute the configured experiment across cfg.workers threads and write the
// artifact files (runs.csv, grid.csv, thresholds.csv, metadata.json, plus
// per-kind extras) under cfg.out_dir. Outputs are byte-identical for any
// worker count.
SweepResult run_experiment(const ExperimentConfig& cfg);

// Run a function over [0, n) on `workers` threads; exceptions propagate.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal formatting (what all CSV writers use).
std::string format_double(double v);

}  // namespace tomo
