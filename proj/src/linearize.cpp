#include "tomo/linearize.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"
#include "tomo/kernels.hpp"

namespace tomo {

namespace {

// Forward pass for a single example keeping activations for logit backprop.
struct SingleForward {
  std::vector<std::vector<double>> act;  // act[0] = input, act.back() = logits
};

SingleForward forward_single(const MlpArchitecture& arch, std::span<const double> w,
                             const double* input) {
  const auto spans = arch.layer_spans();
  SingleForward f;
  f.act.resize(spans.size() + 1);
  f.act[0].assign(input, input + arch.input_dim);
  for (std::size_t l = 0; l < spans.size(); ++l) {
    const auto& s = spans[l];
    const bool last = (l + 1 == spans.size());
    std::vector<double>& z = f.act[l + 1];
    z.assign(w.data() + s.biases_begin, w.data() + s.biases_begin + s.out);
    const std::vector<double>& x = f.act[l];
    for (std::size_t i = 0; i < s.in; ++i) {
      kernels::axpy(x[i], w.data() + s.weights_begin + i * s.out, z.data(), s.out);
    }
    if (!last) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;
    }
  }
  return f;
}

// Gradient of one logit with respect to all parameters.
void logit_gradient(const MlpArchitecture& arch, std::span<const double> w,
                    const SingleForward& f, std::size_t cls, double* out) {
  const auto spans = arch.layer_spans();
  std::fill(out, out + arch.param_count(), 0.0);

  std::vector<double> dz(arch.num_classes, 0.0);
  dz[cls] = 1.0;
  for (std::size_t li = spans.size(); li-- > 0;) {
    const auto& s = spans[li];
    const std::vector<double>& h = f.act[li];
    double* gw = out + s.weights_begin;
    double* gb = out + s.biases_begin;
    for (std::size_t i = 0; i < s.in; ++i) {
      if (h[i] != 0.0) kernels::axpy(h[i], dz.data(), gw + i * s.out, s.out);
    }
    kernels::axpy(1.0, dz.data(), gb, s.out);

    if (li == 0) break;
    std::vector<double> dp(s.in, 0.0);
    for (std::size_t i = 0; i < s.in; ++i) {
      dp[i] = h[i] > 0.0
                  ? kernels::dot(dz.data(), w.data() + s.weights_begin + i * s.out, s.out)
                  : 0.0;
    }
    dz = std::move(dp);
  }
}

double softmax_ce(std::vector<double>& logits, int label, std::size_t* argmax_out) {
  double zmax = logits[0];
  std::size_t arg = 0;
  for (std::size_t j = 1; j < logits.size(); ++j) {
    if (logits[j] > zmax) {
      zmax = logits[j];
      arg = j;
    }
  }
  double denom = 0.0;
  for (double& v : logits) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (double& v : logits) v /= denom;
  if (argmax_out) *argmax_out = arg;
  return -std::log(logits[static_cast<std::size_t>(label)]);
}

}  // namespace

LinearizedModel::LinearizedModel(const MlpArchitecture& arch, FlatParams w_ref,
                                 const Dataset& data, std::size_t max_bytes)
    : w_ref_(std::move(w_ref)),
      num_examples_(data.size()),
      num_classes_(arch.num_classes) {
  arch.validate();
  data.validate();
  if (w_ref_.dim() != arch.param_count()) {
    throw Error(Error::Kind::invalid_argument, "linearize: parameter count mismatch");
  }
  const std::size_t D = arch.param_count();
  const std::size_t rows = num_examples_ * num_classes_;
  const std::size_t required = rows * D * sizeof(double);
  if (required > max_bytes) {
    throw Error(Error::Kind::memory_guard,
                "linearize: Jacobian needs " + std::to_string(required) +
                    " bytes (cap " + std::to_string(max_bytes) + ")");
  }

  jacobian_ = Matrix(rows, D);
  ref_logits_.resize(rows);
  for (std::size_t n = 0; n < num_examples_; ++n) {
    const SingleForward f = forward_single(arch, w_ref_.w, data.inputs.row(n));
    for (std::size_t c = 0; c < num_classes_; ++c) {
      ref_logits_[n * num_classes_ + c] = f.act.back()[c];
      logit_gradient(arch, w_ref_.w, f, c, jacobian_.row(n * num_classes_ + c));
    }
  }
}

LinearizedModel linearize(const MlpArchitecture& arch, const FlatParams& w_opt,
                          const Dataset& data, std::size_t max_bytes) {
  return LinearizedModel(arch, w_opt, data, max_bytes);
}

std::vector<double> LinearizedModel::logits(std::span<const double> w,
                                            std::size_t n) const {
  std::vector<double> dw(w.begin(), w.end());
  for (std::size_t i = 0; i < dw.size(); ++i) dw[i] -= w_ref_.w[i];
  std::vector<double> out(num_classes_);
  for (std::size_t c = 0; c < num_classes_; ++c) {
    const std::size_t r = n * num_classes_ + c;
    out[c] = ref_logits_[r] + kernels::dot(jacobian_.row(r), dw.data(), dw.size());
  }
  return out;
}

double LinearizedModel::loss(std::span<const double> w, const Dataset& data) const {
  std::vector<double> dw(w.begin(), w.end());
  for (std::size_t i = 0; i < dw.size(); ++i) dw[i] -= w_ref_.w[i];
  double loss = 0.0;
  std::vector<double> z(num_classes_);
  for (std::size_t n = 0; n < num_examples_; ++n) {
    for (std::size_t c = 0; c < num_classes_; ++c) {
      const std::size_t r = n * num_classes_ + c;
      z[c] = ref_logits_[r] + kernels::dot(jacobian_.row(r), dw.data(), dw.size());
    }
    loss += softmax_ce(z, data.labels[n], nullptr);
  }
  return loss / static_cast<double>(num_examples_);
}

namespace {

class LinearizedObjective final : public BatchObjective {
 public:
  LinearizedObjective(const LinearizedModel& model, const Dataset& data)
      : model_(model), data_(data) {
    if (data.size() != model.num_examples() ||
        data.num_classes != model.num_classes()) {
      throw Error(Error::Kind::invalid_argument,
                  "linearized objective: dataset mismatch");
    }
  }

  std::size_t param_dim() const override { return model_.param_dim(); }
  std::size_t num_examples() const override { return model_.num_examples(); }

  double batch_loss_grad(std::span<const double> w,
                         std::span<const std::size_t> batch,
                         std::vector<double>& grad) override {
    const std::size_t D = param_dim();
    const std::size_t C = model_.num_classes();
    grad.assign(D, 0.0);
    std::vector<double> dw(w.begin(), w.end());
    for (std::size_t i = 0; i < D; ++i) dw[i] -= model_.reference_point().w[i];

    double loss = 0.0;
    std::vector<double> z(C);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    for (std::size_t n : batch) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t r = n * C + c;
        z[c] = model_.reference_logits()[r] +
               kernels::dot(model_.jacobian().row(r), dw.data(), D);
      }
      loss += softmax_ce(z, data_.labels[n], nullptr);
      // dL/dw = J^T (softmax - onehot) / B
      for (std::size_t c = 0; c < C; ++c) {
        double coef = z[c] * inv_b;
        if (static_cast<int>(c) == data_.labels[n]) coef -= inv_b;
        kernels::axpy(coef, model_.jacobian().row(n * C + c), grad.data(), D);
      }
    }
    return loss * inv_b;
  }

  StepStat evaluate_full(std::span<const double> w) override {
    const std::size_t D = param_dim();
    const std::size_t C = model_.num_classes();
    std::vector<double> dw(w.begin(), w.end());
    for (std::size_t i = 0; i < D; ++i) dw[i] -= model_.reference_point().w[i];
    StepStat st;
    std::size_t correct = 0;
    std::vector<double> z(C);
    for (std::size_t n = 0; n < model_.num_examples(); ++n) {
      for (std::size_t c = 0; c < C; ++c) {
        const std::size_t r = n * C + c;
        z[c] = model_.reference_logits()[r] +
               kernels::dot(model_.jacobian().row(r), dw.data(), D);
      }
      std::size_t arg = 0;
      st.loss += softmax_ce(z, data_.labels[n], &arg);
      if (arg == static_cast<std::size_t>(data_.labels[n])) ++correct;
    }
    st.loss /= static_cast<double>(model_.num_examples());
    st.acc = static_cast<double>(correct) / static_cast<double>(model_.num_examples());
    return st;
  }

 private:
  const LinearizedModel& model_;
  const Dataset& data_;
};

}  // namespace

std::unique_ptr<BatchObjective> make_linearized_objective(const LinearizedModel& model,
                                                          const Dataset& data) {
  return std::make_unique<LinearizedObjective>(model, data);
}

}  // namespace tomo
