#include "tomo/neural.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

std::vector<std::size_t> MlpArchitecture::layer_widths() const {
  std::vector<std::size_t> w;
  w.push_back(input_dim);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(num_classes);
  return w;
}

std::vector<MlpArchitecture::LayerSpan> MlpArchitecture::layer_spans() const {
  std::vector<LayerSpan> spans;
  const auto widths = layer_widths();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    LayerSpan s;
    s.in = widths[l];
    s.out = widths[l + 1];
    s.weights_begin = offset;
    s.biases_begin = offset + s.in * s.out;
    s.end = s.biases_begin + s.out;
    offset = s.end;
    spans.push_back(s);
  }
  return spans;
}

std::size_t MlpArchitecture::param_count() const {
  return layer_spans().back().end;
}

void MlpArchitecture::validate() const {
  if (input_dim == 0 || num_classes < 2 || hidden.empty()) {
    throw Error(Error::Kind::invalid_argument,
                "MlpArchitecture: need input dim, >=1 hidden layer, >=2 classes");
  }
  for (std::size_t h : hidden) {
    if (h == 0) {
      throw Error(Error::Kind::invalid_argument, "MlpArchitecture: empty hidden layer");
    }
  }
}

void Dataset::validate() const {
  if (size() == 0 || num_classes < 2) {
    throw Error(Error::Kind::invalid_argument, "Dataset: empty or too few classes");
  }
  if (labels.size() != size()) {
    throw Error(Error::Kind::invalid_argument, "Dataset: label count mismatch");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw Error(Error::Kind::invalid_argument, "Dataset: label out of range");
    }
  }
  if (!inputs.all_finite()) {
    throw Error(Error::Kind::invalid_argument, "Dataset: non-finite input");
  }
}

void AdamConfig::validate() const {
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0)) {
    throw Error(Error::Kind::invalid_argument, "AdamConfig: betas must be in (0,1)");
  }
  if (!(learning_rate > 0.0) || !(epsilon > 0.0) || batch_size == 0) {
    throw Error(Error::Kind::invalid_argument, "AdamConfig: bad optimizer settings");
  }
}

void adam_step(AdamState& state, std::span<const double> grad,
               const AdamConfig& config, std::span<double> params) {
  if (grad.size() != params.size() || grad.size() != state.m.size()) {
    throw Error(Error::Kind::invalid_argument, "adam_step: dimension mismatch");
  }
  state.step += 1;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  const double lr = config.learning_rate;
  const double eps = config.epsilon;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

FlatParams init_params(const MlpArchitecture& arch, RngStream& rng) {
  arch.validate();
  FlatParams p;
  p.w.assign(arch.param_count(), 0.0);
  for (const auto& s : arch.layer_spans()) {
    const double std_dev = 1.0 / std::sqrt(static_cast<double>(s.in));
    for (std::size_t i = s.weights_begin; i < s.biases_begin; ++i) {
      p.w[i] = std_dev * rng.next_gaussian();
    }
    // biases stay zero
  }
  return p;
}

std::string subspace_kind_name(SubspaceKind k) {
  switch (k) {
    case SubspaceKind::full: return "full";
    case SubspaceKind::random: return "random";
    case SubspaceKind::burn_in: return "burn-in";
    case SubspaceKind::lottery: return "lottery";
    case SubspaceKind::linearized: return "linearized";
    case SubspaceKind::ticket: return "ticket";
  }
  return "?";
}

namespace {

// Scratch buffers for one forward/backward pass over a batch. Activations
// are batch-major so rows feed the kernels directly.
struct Workspace {
  std::vector<Matrix> act;    // act[l]: batch x width_l (act[0] = inputs)
  std::vector<Matrix> delta;  // delta[l]: batch x width_{l+1}

  void resize(const std::vector<std::size_t>& widths, std::size_t batch) {
    act.assign(widths.size(), Matrix());
    delta.assign(widths.size() - 1, Matrix());
    for (std::size_t l = 0; l < widths.size(); ++l) act[l] = Matrix(batch, widths[l]);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      delta[l] = Matrix(batch, widths[l + 1]);
    }
  }
};

// Forward pass; returns mean cross-entropy and (optionally) correct count.
// Leaves pre-softmax logits in ws.act.back() overwritten by softmax probs.
double forward(const MlpArchitecture& arch, std::span<const double> w,
               const Dataset& data, std::span<const std::size_t> batch,
               Workspace& ws, std::size_t* correct_out) {
  const auto spans = arch.layer_spans();
  const std::size_t B = batch.size();

  for (std::size_t b = 0; b < B; ++b) {
    const double* src = data.inputs.row(batch[b]);
    std::copy(src, src + arch.input_dim, ws.act[0].row(b));
  }

  for (std::size_t l = 0; l < spans.size(); ++l) {
    const auto& s = spans[l];
    const bool last = (l + 1 == spans.size());
    Matrix& in = ws.act[l];
    Matrix& out = ws.act[l + 1];
    const double* bias = w.data() + s.biases_begin;
    for (std::size_t b = 0; b < B; ++b) {
      double* z = out.row(b);
      std::copy(bias, bias + s.out, z);
      const double* x = in.row(b);
      for (std::size_t i = 0; i < s.in; ++i) {
        kernels::axpy(x[i], w.data() + s.weights_begin + i * s.out, z, s.out);
      }
      if (!last) {
        for (std::size_t j = 0; j < s.out; ++j) z[j] = z[j] > 0.0 ? z[j] : 0.0;
      }
    }
  }

  // Softmax + cross-entropy on the logits (in place).
  Matrix& logits = ws.act.back();
  const std::size_t C = arch.num_classes;
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t b = 0; b < B; ++b) {
    double* z = logits.row(b);
    std::size_t arg = 0;
    double zmax = z[0];
    for (std::size_t j = 1; j < C; ++j) {
      if (z[j] > zmax) {
        zmax = z[j];
        arg = j;
      }
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < C; ++j) {
      z[j] = std::exp(z[j] - zmax);
      denom += z[j];
    }
    const int y = data.labels[batch[b]];
    loss -= std::log(z[static_cast<std::size_t>(y)] / denom);
    kernels::scale(z, 1.0 / denom, C);
    if (arg == static_cast<std::size_t>(y)) ++correct;
  }
  if (correct_out) *correct_out = correct;
  return loss / static_cast<double>(B);
}

// Backward pass; accumulates the exact mean-loss gradient into grad (which
// must be zeroed by the caller). Assumes forward() just ran on this batch.
void backward(const MlpArchitecture& arch, std::span<const double> w,
              const Dataset& data, std::span<const std::size_t> batch,
              Workspace& ws, std::vector<double>& grad) {
  const auto spans = arch.layer_spans();
  const std::size_t B = batch.size();
  const std::size_t C = arch.num_classes;
  const double inv_b = 1.0 / static_cast<double>(B);

  // dZ_last = (softmax - onehot) / B
  Matrix& dlast = ws.delta.back();
  const Matrix& probs = ws.act.back();
  for (std::size_t b = 0; b < B; ++b) {
    const double* p = probs.row(b);
    double* dz = dlast.row(b);
    for (std::size_t j = 0; j < C; ++j) dz[j] = p[j] * inv_b;
    dz[static_cast<std::size_t>(data.labels[batch[b]])] -= inv_b;
  }

  for (std::size_t li = spans.size(); li-- > 0;) {
    const auto& s = spans[li];
    const Matrix& h = ws.act[li];
    const Matrix& dz = ws.delta[li];

    double* gw = grad.data() + s.weights_begin;
    double* gb = grad.data() + s.biases_begin;
    for (std::size_t b = 0; b < B; ++b) {
      const double* hrow = h.row(b);
      const double* dzrow = dz.row(b);
      for (std::size_t i = 0; i < s.in; ++i) {
        if (hrow[i] != 0.0) kernels::axpy(hrow[i], dzrow, gw + i * s.out, s.out);
      }
      kernels::axpy(1.0, dzrow, gb, s.out);
    }

    if (li == 0) break;
    // dH = dZ W^T, then gate through the ReLU that produced act[li].
    Matrix& dprev = ws.delta[li - 1];
    for (std::size_t b = 0; b < B; ++b) {
      const double* dzrow = dz.row(b);
      const double* hrow = h.row(b);
      double* dst = dprev.row(b);
      for (std::size_t i = 0; i < s.in; ++i) {
        dst[i] = hrow[i] > 0.0
                     ? kernels::dot(dzrow, w.data() + s.weights_begin + i * s.out, s.out)
                     : 0.0;
      }
    }
  }
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.next_below(i)]);
  }
}

class MlpObjective final : public BatchObjective {
 public:
  MlpObjective(const MlpArchitecture& arch, const Dataset& data)
      : arch_(arch), data_(data), widths_(arch.layer_widths()) {
    arch.validate();
    data.validate();
    if (data.inputs.cols() != arch.input_dim || data.num_classes != arch.num_classes) {
      throw Error(Error::Kind::invalid_argument, "MLP/dataset shape mismatch");
    }
  }

  std::size_t param_dim() const override { return arch_.param_count(); }
  std::size_t num_examples() const override { return data_.size(); }

  double batch_loss_grad(std::span<const double> w,
                         std::span<const std::size_t> batch,
                         std::vector<double>& grad) override {
    grad.assign(param_dim(), 0.0);
    ws_.resize(widths_, batch.size());
    const double loss = forward(arch_, w, data_, batch, ws_, nullptr);
    backward(arch_, w, data_, batch, ws_, grad);
    return loss;
  }

  StepStat evaluate_full(std::span<const double> w) override {
    eval_ws_.resize(widths_, data_.size());
    std::size_t correct = 0;
    const auto idx = all_indices(data_.size());
    StepStat st;
    st.loss = forward(arch_, w, data_, idx, eval_ws_, &correct);
    st.acc = static_cast<double>(correct) / static_cast<double>(data_.size());
    return st;
  }

 private:
  MlpArchitecture arch_;
  const Dataset& data_;
  std::vector<std::size_t> widths_;
  Workspace ws_;
  Workspace eval_ws_;
};

void record_stat(TrainRecord& rec, const StepStat& st) {
  rec.steps.push_back(st);
  if (rec.steps.size() == 1) {
    rec.best_loss = st.loss;
    rec.best_acc = st.acc;
  } else {
    rec.best_loss = std::min(rec.best_loss, st.loss);
    rec.best_acc = std::max(rec.best_acc, st.acc);
  }
}

}  // namespace

LossGrad loss_and_grad(const MlpArchitecture& arch, const FlatParams& params,
                       const Dataset& data) {
  MlpObjective obj(arch, data);
  if (params.dim() != obj.param_dim()) {
    throw Error(Error::Kind::invalid_argument, "loss_and_grad: parameter count mismatch");
  }
  LossGrad lg;
  const auto idx = all_indices(data.size());
  lg.loss = obj.batch_loss_grad(params.w, idx, lg.grad);
  return lg;
}

StepStat evaluate(const MlpArchitecture& arch, const FlatParams& params,
                  const Dataset& data) {
  MlpObjective obj(arch, data);
  if (params.dim() != obj.param_dim()) {
    throw Error(Error::Kind::invalid_argument, "evaluate: parameter count mismatch");
  }
  return obj.evaluate_full(params.w);
}

std::unique_ptr<BatchObjective> make_mlp_objective(const MlpArchitecture& arch,
                                                   const Dataset& data) {
  return std::make_unique<MlpObjective>(arch, data);
}

namespace {

// Core minibatch loop over the raw parameter vector (full-space and masked
// runs). Masked coordinates are zeroed up front and their gradient entries
// dropped before each update, so they stay exactly zero for the whole run.
FullTrainResult train_direct(BatchObjective& objective, const FlatParams& params0,
                             std::span<const std::uint8_t> mask,
                             const AdamConfig& config, RngStream& rng,
                             const TrainOptions& options, SubspaceKind kind) {
  config.validate();
  const std::size_t D = objective.param_dim();
  if (params0.dim() != D) {
    throw Error(Error::Kind::invalid_argument, "train: parameter count mismatch");
  }
  if (!mask.empty() && mask.size() != D) {
    throw Error(Error::Kind::invalid_argument, "train: mask length mismatch");
  }

  std::vector<double> w = params0.w;
  std::size_t masked_dim = D;
  if (!mask.empty()) {
    masked_dim = 0;
    for (std::size_t i = 0; i < D; ++i) {
      if (mask[i]) {
        ++masked_dim;
      } else {
        w[i] = 0.0;
      }
    }
  }

  FullTrainResult out;
  out.record.stream_id = rng.stream_id();
  out.record.kind = kind;
  out.record.d = masked_dim;
  out.record.t = 0;

  const std::size_t N = objective.num_examples();
  const std::size_t steps_per_epoch = (N + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = steps_per_epoch * config.epochs;

  record_stat(out.record, objective.evaluate_full(w));
  if (options.snapshot_every > 0) out.trajectory.push_back(FlatParams{w});

  AdamState adam(D);
  std::vector<double> grad;
  std::vector<std::size_t> order = all_indices(N);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < N; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, N - start);
      objective.batch_loss_grad(w, {order.data() + start, len}, grad);
      if (!mask.empty()) {
        for (std::size_t i = 0; i < D; ++i) {
          if (!mask[i]) grad[i] = 0.0;
        }
      }
      adam_step(adam, grad, config, w);
      if (!mask.empty()) {
        // Adam's epsilon keeps zero-gradient coordinates still; re-zero to
        // guard against bias-correction drift in degenerate configs.
        for (std::size_t i = 0; i < D; ++i) {
          if (!mask[i]) w[i] = 0.0;
        }
      }
      ++step;
      const bool last = (step == total_steps);
      if ((options.eval_every > 0 && step % options.eval_every == 0) || last) {
        record_stat(out.record, objective.evaluate_full(w));
      }
      if (options.snapshot_every > 0 &&
          (step % options.snapshot_every == 0 ||
           (last && step % options.snapshot_every != 0))) {
        out.trajectory.push_back(FlatParams{w});
      }
    }
  }
  out.final_params = FlatParams{std::move(w)};
  return out;
}

}  // namespace

FullTrainResult train_full(const MlpArchitecture& arch, const FlatParams& params0,
                           const Dataset& data, const AdamConfig& config,
                           RngStream& rng, const TrainOptions& options) {
  MlpObjective obj(arch, data);
  return train_direct(obj, params0, {}, config, rng, options, SubspaceKind::full);
}

FullTrainResult train_masked(const MlpArchitecture& arch, const FlatParams& params0,
                             std::span<const std::uint8_t> mask, const Dataset& data,
                             const AdamConfig& config, RngStream& rng,
                             const TrainOptions& options) {
  MlpObjective obj(arch, data);
  return train_direct(obj, params0, mask, config, rng, options, SubspaceKind::ticket);
}

TrainRecord train_objective_in_subspace(BatchObjective& objective,
                                        const SubspaceBasis& basis,
                                        const AdamConfig& config, RngStream& rng,
                                        const TrainOptions& options,
                                        SubspaceKind kind, int t) {
  config.validate();
  const std::size_t D = objective.param_dim();
  if (basis.ambient_dim() != D) {
    throw Error(Error::Kind::invalid_argument,
                "train_in_subspace: basis ambient dimension mismatch");
  }
  const std::size_t d = basis.dim();

  TrainRecord rec;
  rec.stream_id = rng.stream_id();
  rec.kind = kind;
  rec.d = d;
  rec.t = t;

  std::vector<double> w(basis.offset);
  record_stat(rec, objective.evaluate_full(w));
  if (d == 0) return rec;  // nothing trainable: the record is the offset eval

  const std::size_t N = objective.num_examples();
  const std::size_t steps_per_epoch = (N + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = steps_per_epoch * config.epochs;

  std::vector<double> theta(d, 0.0);
  AdamState adam(d);
  std::vector<double> grad_w;
  std::vector<double> grad_theta(d);
  std::vector<std::size_t> order = all_indices(N);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < N; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, N - start);
      objective.batch_loss_grad(w, {order.data() + start, len}, grad_w);

      // grad_theta = A^T grad_w
      std::fill(grad_theta.begin(), grad_theta.end(), 0.0);
      for (std::size_t i = 0; i < D; ++i) {
        kernels::axpy(grad_w[i], basis.a.row(i), grad_theta.data(), d);
      }
      adam_step(adam, grad_theta, config, theta);

      // w = A theta + offset
      for (std::size_t i = 0; i < D; ++i) {
        w[i] = kernels::dot(basis.a.row(i), theta.data(), d) + basis.offset[i];
      }
      ++step;
      const bool last = (step == total_steps);
      if ((options.eval_every > 0 && step % options.eval_every == 0) || last) {
        record_stat(rec, objective.evaluate_full(w));
      }
    }
  }
  return rec;
}

TrainRecord train_in_subspace(const MlpArchitecture& arch, const SubspaceBasis& basis,
                              const Dataset& data, const AdamConfig& config,
                              RngStream& rng, const TrainOptions& options,
                              SubspaceKind kind, int t) {
  MlpObjective obj(arch, data);
  return train_objective_in_subspace(obj, basis, config, rng, options, kind, t);
}

FlatParams burn_in_offset(const MlpArchitecture& arch, const FlatParams& params0,
                          const Dataset& data, std::size_t t, const AdamConfig& config,
                          RngStream& rng) {
  if (t == 0) return params0;
  config.validate();
  MlpObjective obj(arch, data);
  if (params0.dim() != obj.param_dim()) {
    throw Error(Error::Kind::invalid_argument, "burn_in_offset: parameter count mismatch");
  }

  std::vector<double> w = params0.w;
  AdamState adam(w.size());
  std::vector<double> grad;
  const std::size_t N = data.size();
  std::vector<std::size_t> order = all_indices(N);
  std::size_t step = 0;
  while (true) {
    shuffle_indices(order, rng);
    for (std::size_t start = 0; start < N; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, N - start);
      obj.batch_loss_grad(w, {order.data() + start, len}, grad);
      adam_step(adam, grad, config, w);
      if (++step == t) return FlatParams{std::move(w)};
    }
  }
}

}  // namespace tomo
