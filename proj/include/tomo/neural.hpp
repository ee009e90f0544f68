#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tomo/landscapes.hpp"
#include "tomo/matrix.hpp"
#include "tomo/rng.hpp"

namespace tomo {

// Fully-connected ReLU classifier trained with softmax cross-entropy.
struct MlpArchitecture {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden;  // at least one hidden layer
  std::size_t num_classes = 0;

  std::size_t num_layers() const { return hidden.size() + 1; }
  std::vector<std::size_t> layer_widths() const;  // input, hidden..., classes
  std::size_t param_count() const;

  // Flat layout: per layer, the (in x out) row-major weight block followed by
  // the bias block. span = [begin, end) into the flat vector.
  struct LayerSpan {
    std::size_t weights_begin = 0;
    std::size_t biases_begin = 0;
    std::size_t end = 0;
    std::size_t in = 0;
    std::size_t out = 0;
  };
  std::vector<LayerSpan> layer_spans() const;

  void validate() const;
};

// All weights and biases flattened in fixed layer order.
struct FlatParams {
  std::vector<double> w;

  std::size_t dim() const { return w.size(); }
};

struct Dataset {
  Matrix inputs;            // N x input_dim
  std::vector<int> labels;  // values in [0, num_classes)
  std::size_t num_classes = 0;

  std::size_t size() const { return inputs.rows(); }
  void validate() const;
};

struct AdamConfig {
  double learning_rate = 5e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  std::size_t batch_size = 128;
  std::size_t epochs = 3;

  void validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}
};

// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<const double> grad,
               const AdamConfig& config, std::span<double> params);

// Fan-in-scaled Gaussian weights (std 1/sqrt(fan_in)), zero biases.
FlatParams init_params(const MlpArchitecture& arch, RngStream& rng);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean cross-entropy and its exact gradient over the whole dataset.
LossGrad loss_and_grad(const MlpArchitecture& arch, const FlatParams& params,
                       const Dataset& data);

struct StepStat {
  double loss = 0.0;
  double acc = 0.0;
};

// Full-train-set loss and accuracy.
StepStat evaluate(const MlpArchitecture& arch, const FlatParams& params,
                  const Dataset& data);

enum class SubspaceKind { full, random, burn_in, lottery, linearized, ticket };
std::string subspace_kind_name(SubspaceKind k);

struct TrainRecord {
  std::uint64_t stream_id = 0;
  SubspaceKind kind = SubspaceKind::full;
  std::size_t d = 0;  // training dimension (param count for full runs)
  int t = 0;          // burn-in steps behind the offset
  std::vector<StepStat> steps;  // initial state plus one entry per recorded step
  double best_loss = 0.0;
  double best_acc = 0.0;
};

struct TrainOptions {
  // Evaluate the full training set every eval_every steps (initial and final
  // state are always recorded). 0 disables intermediate evals.
  std::size_t eval_every = 1;
  // Record a parameter snapshot every snapshot_every steps into the returned
  // trajectory (0 disables; the initial point is always included when on).
  std::size_t snapshot_every = 1;
};

struct FullTrainResult {
  TrainRecord record;
  std::vector<FlatParams> trajectory;  // snapshots, starting at params0
  FlatParams final_params;
};

// Minibatch Adam on all parameters. Batch order is a fixed shuffle per epoch
// drawn from `rng`.
FullTrainResult train_full(const MlpArchitecture& arch, const FlatParams& params0,
                           const Dataset& data, const AdamConfig& config,
                           RngStream& rng, const TrainOptions& options = {});

// Same loop with frozen coordinates: masked-out parameters are zeroed at the
// start and their gradients suppressed every step. An all-ones mask
// reproduces train_full bit for bit.
FullTrainResult train_masked(const MlpArchitecture& arch, const FlatParams& params0,
                             std::span<const std::uint8_t> mask, const Dataset& data,
                             const AdamConfig& config, RngStream& rng,
                             const TrainOptions& options = {});

// Optimize theta with w = A theta + offset, gradient pulled back as A^T g.
TrainRecord train_in_subspace(const MlpArchitecture& arch, const SubspaceBasis& basis,
                              const Dataset& data, const AdamConfig& config,
                              RngStream& rng, const TrainOptions& options = {},
                              SubspaceKind kind = SubspaceKind::random, int t = 0);

// Parameters after t full-space Adam steps from params0 (t = 0 returns
// params0 unchanged).
FlatParams burn_in_offset(const MlpArchitecture& arch, const FlatParams& params0,
                          const Dataset& data, std::size_t t, const AdamConfig& config,
                          RngStream& rng);

// Internal training-objective interface shared by the true network and its
// linearization; exposed for the linearize module and tests.
class BatchObjective {
 public:
  virtual ~BatchObjective() = default;
  virtual std::size_t param_dim() const = 0;
  virtual std::size_t num_examples() const = 0;
  virtual double batch_loss_grad(std::span<const double> w,
                                 std::span<const std::size_t> batch,
                                 std::vector<double>& grad) = 0;
  virtual StepStat evaluate_full(std::span<const double> w) = 0;
};

std::unique_ptr<BatchObjective> make_mlp_objective(const MlpArchitecture& arch,
                                                   const Dataset& data);

TrainRecord train_objective_in_subspace(BatchObjective& objective,
                                        const SubspaceBasis& basis,
                                        const AdamConfig& config, RngStream& rng,
                                        const TrainOptions& options,
                                        SubspaceKind kind, int t);

}  // namespace tomo
