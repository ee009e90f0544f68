#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tomo/neural.hpp"

namespace tomo {

enum class ExperimentKind {
  quadratic_sweep,
  nn_sweep,
  width_estimate,
  affine_distance,
  lottery,
  ticket,
};

std::string experiment_kind_name(ExperimentKind k);

struct SpectrumConfig {
  enum class Type { bimodal, bulk } type = Type::bimodal;
  // bimodal
  std::size_t num_small = 50;
  double lambda_small = 0.01;
  double lambda_large = 10.0;
  // bulk
  double lambda_min = 1e-3;
  double lambda_max = 10.0;
  std::uint64_t spectrum_seed = 7;
};

struct QuadraticConfig {
  std::size_t dim = 100;
  SpectrumConfig spectrum;
  std::vector<double> radii = {1.0};
  std::vector<std::size_t> dims;
  std::vector<double> epsilons;
};

struct DataConfig {
  enum class Type { blobs, idx } type = Type::blobs;
  // blobs
  std::size_t classes = 10;
  std::size_t per_class = 200;
  std::size_t dim = 20;
  double separation = 6.0;
  std::uint64_t data_seed = 1;
  // idx
  std::string images;
  std::string labels;
  std::size_t limit = 512;
};

struct NnConfig {
  DataConfig data;
  std::vector<std::size_t> hidden = {128, 64};
  std::vector<std::size_t> dims;
  std::vector<int> burn_in_steps = {0, 16};
  std::vector<double> loss_thresholds;
  std::vector<double> accuracy_thresholds;
  AdamConfig optimizer;
  std::size_t eval_every = 1;
  bool linearized = false;
  std::size_t linearize_max_bytes = std::size_t{1} << 30;
};

struct LotteryConfig {
  DataConfig data;
  std::vector<std::size_t> hidden = {128, 64};
  std::vector<std::size_t> dims = {1, 2, 4, 8, 16, 32};
  std::size_t seeds = 10;
  int rewind_t = 0;
  bool use_deltas = true;  // step deltas; false = raw snapshots
  bool include_random_baseline = true;
  std::vector<double> loss_thresholds;
  std::vector<double> accuracy_thresholds;
  AdamConfig optimizer;
  std::size_t eval_every = 1;
};

struct TicketConfig {
  DataConfig data;
  std::vector<std::size_t> hidden = {128, 64};
  std::vector<double> keep_fractions = {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.002};
  std::size_t seeds = 5;
  std::size_t pretrain_epochs = 2;
  std::vector<double> loss_thresholds;
  std::vector<double> accuracy_thresholds;
  AdamConfig optimizer;
  std::size_t eval_every = 1;
};

struct WidthConfig {
  std::size_t cases = 100;
  std::size_t max_dim = 50;
  std::size_t num_gaussians = 10000;
  double radius_min = 0.1;
  double radius_max = 10.0;
};

struct AffineConfig {
  std::size_t dim = 100;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (n, d)
  std::size_t trials = 1000;
};

struct ExperimentConfig {
  std::string experiment;
  ExperimentKind kind = ExperimentKind::quadratic_sweep;
  std::uint64_t master_seed = 42;
  std::size_t workers = 1;
  double delta = 0.1;
  std::size_t runs = 10;
  bool svg = false;
  std::string out_dir = "out";

  QuadraticConfig quadratic;
  NnConfig nn;
  LotteryConfig lottery;
  TicketConfig ticket;
  WidthConfig width;
  AffineConfig affine;

  void validate() const;
};

// Frozen defaults per experiment kind (what the CLI runs without --config).
ExperimentConfig default_config(ExperimentKind kind);

// Parse a JSON config document; unknown keys are rejected with
// Error::Kind::config naming the offending path. The `kind` comes from the
// CLI subcommand; a "kind" field in the document must agree.
ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind);
ExperimentConfig load_config_file(const std::string& path, ExperimentKind kind);

// Canonical JSON echo of a config (used for --dump-config and metadata.json;
// excludes runtime-only fields like workers and the output directory).
std::string config_to_json(const ExperimentConfig& cfg, bool include_runtime);

}  // namespace tomo
