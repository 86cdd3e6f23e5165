// Copyright 2026 The LDPFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpfl/neuralnet.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "absl/strings/str_cat.h"
#include "ldpfl/internal/status_macros.h"
#include "ldpfl/random.h"

namespace ldpfl {
namespace {

// Per-sample scratch: pre-activations and activations of every layer.
struct Workspace {
  std::vector<std::vector<double>> pre;   // pre[l] = z of layer l
  std::vector<std::vector<double>> post;  // post[0] = input, post[l+1] = a
  std::vector<std::vector<double>> delta;
  std::vector<size_t> nonzero;

  explicit Workspace(const ModelParams& params) {
    const size_t n = params.layers.size();
    pre.resize(n);
    post.resize(n + 1);
    delta.resize(n);
    post[0].resize(params.layers.front().inputs);
    for (size_t l = 0; l < n; ++l) {
      pre[l].resize(params.layers[l].outputs);
      post[l + 1].resize(params.layers[l].outputs);
      delta[l].resize(params.layers[l].outputs);
    }
  }
};

void Activate(Activation act, const std::vector<double>& z,
              std::vector<double>& a) {
  switch (act) {
    case Activation::kRelu:
      for (size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
      break;
    case Activation::kSigmoid:
      for (size_t i = 0; i < z.size(); ++i) a[i] = 1.0 / (1.0 + std::exp(-z[i]));
      break;
    case Activation::kSoftmax: {
      const double top = *std::max_element(z.begin(), z.end());
      double total = 0.0;
      for (size_t i = 0; i < z.size(); ++i) {
        a[i] = std::exp(z[i] - top);
        total += a[i];
      }
      for (double& v : a) v /= total;
      break;
    }
  }
}

// Runs the first `depth` layers on ws.post[0].
void ForwardInPlace(const ModelParams& params, Workspace& ws, size_t depth) {
  for (size_t l = 0; l < depth; ++l) {
    const DenseLayer& layer = params.layers[l];
    const std::vector<double>& in = ws.post[l];
    ws.nonzero.clear();
    for (size_t i = 0; i < in.size(); ++i) {
      if (in[i] != 0.0) ws.nonzero.push_back(i);
    }
    std::vector<double>& z = ws.pre[l];
    for (int o = 0; o < layer.outputs; ++o) {
      const double* row = layer.weights.data() + static_cast<size_t>(o) * layer.inputs;
      double sum = layer.bias[o];
      for (size_t i : ws.nonzero) sum += row[i] * in[i];
      z[o] = sum;
    }
    Activate(layer.activation, z, ws.post[l + 1]);
  }
}

// -log softmax(z)[label], computed from logits.
double LogitsLoss(const std::vector<double>& z, int label) {
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - top);
  return top + std::log(total) - z[label];
}

absl::Status CheckInput(const ModelParams& params, size_t width) {
  if (params.layers.empty()) {
    return absl::FailedPreconditionError("model has no layers");
  }
  if (width != static_cast<size_t>(params.layers.front().inputs)) {
    return absl::FailedPreconditionError(
        absl::StrCat("input has ", width, " features, model expects ",
                     params.layers.front().inputs));
  }
  return absl::OkStatus();
}

absl::Status CheckRows(const ModelParams& params, const Dataset& rows) {
  LDPFL_RETURN_IF_ERROR(CheckInput(params, rows.dims));
  LDPFL_RETURN_IF_ERROR(rows.Validate());
  const int classes = params.layers.back().outputs;
  if (rows.num_classes > classes) {
    return absl::FailedPreconditionError(
        absl::StrCat("dataset has ", rows.num_classes,
                     " classes, model outputs ", classes));
  }
  return absl::OkStatus();
}

void SetZero(ModelParams& params) {
  for (DenseLayer& layer : params.layers) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

ModelParams ZerosLike(const ModelParams& params) {
  ModelParams out = params;
  SetZero(out);
  return out;
}

// Forward + backward for one sample; adds the gradient into `grad` and returns
// the sample loss.
double AccumulateGradient(const ModelParams& params,
                          std::span<const double> input, int label,
                          Workspace& ws, ModelParams& grad) {
  std::copy(input.begin(), input.end(), ws.post[0].begin());
  const size_t n = params.layers.size();
  ForwardInPlace(params, ws, n);
  const double loss = LogitsLoss(ws.pre[n - 1], label);

  // Softmax + cross-entropy: dL/dz = p - onehot.
  ws.delta[n - 1] = ws.post[n];
  ws.delta[n - 1][label] -= 1.0;

  for (size_t l = n; l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    DenseLayer& g = grad.layers[l];
    const std::vector<double>& in = ws.post[l];
    const std::vector<double>& d = ws.delta[l];
    ws.nonzero.clear();
    for (size_t i = 0; i < in.size(); ++i) {
      if (in[i] != 0.0) ws.nonzero.push_back(i);
    }
    for (int o = 0; o < layer.outputs; ++o) {
      if (d[o] == 0.0) continue;
      double* grow = g.weights.data() + static_cast<size_t>(o) * layer.inputs;
      for (size_t i : ws.nonzero) grow[i] += d[o] * in[i];
      g.bias[o] += d[o];
    }
    if (l == 0) break;

    std::vector<double>& prev = ws.delta[l - 1];
    std::fill(prev.begin(), prev.end(), 0.0);
    for (int o = 0; o < layer.outputs; ++o) {
      if (d[o] == 0.0) continue;
      const double* row = layer.weights.data() + static_cast<size_t>(o) * layer.inputs;
      for (int i = 0; i < layer.inputs; ++i) prev[i] += row[i] * d[o];
    }
    const Activation act = params.layers[l - 1].activation;
    const std::vector<double>& z = ws.pre[l - 1];
    const std::vector<double>& a = ws.post[l];
    for (size_t i = 0; i < prev.size(); ++i) {
      if (act == Activation::kRelu) {
        if (z[i] <= 0.0) prev[i] = 0.0;
      } else {
        prev[i] *= a[i] * (1.0 - a[i]);
      }
    }
  }
  return loss;
}

// Applies fn(param, grad, index) over all scalars in layer order.
template <typename Fn>
void ForEachParam(ModelParams& params, const ModelParams& grad, Fn&& fn) {
  size_t k = 0;
  for (size_t l = 0; l < params.layers.size(); ++l) {
    DenseLayer& layer = params.layers[l];
    const DenseLayer& g = grad.layers[l];
    for (size_t i = 0; i < layer.weights.size(); ++i) fn(layer.weights[i], g.weights[i], k++);
    for (size_t i = 0; i < layer.bias.size(); ++i) fn(layer.bias[i], g.bias[i], k++);
  }
}

}  // namespace

absl::StatusOr<Activation> ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "softmax") return Activation::kSoftmax;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown activation '", std::string(name), "'"));
}

std::string_view ActivationName(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kSoftmax:
      return "softmax";
  }
  return "unknown";
}

LayerLayout LayerLayout::Classifier(std::vector<int> sizes) {
  LayerLayout layout;
  const size_t layers = sizes.size() < 2 ? 0 : sizes.size() - 1;
  layout.activations.assign(layers, Activation::kRelu);
  if (layers > 0) layout.activations.back() = Activation::kSoftmax;
  layout.sizes = std::move(sizes);
  return layout;
}

absl::Status LayerLayout::Validate() const {
  if (sizes.size() < 2) {
    return absl::InvalidArgumentError("layout needs at least two layer sizes");
  }
  if (activations.size() != sizes.size() - 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("layout has ", sizes.size(), " sizes but ",
                     activations.size(), " activations"));
  }
  for (int s : sizes) {
    if (s < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("layer sizes must be positive, got ", s));
    }
  }
  for (size_t l = 0; l < activations.size(); ++l) {
    const bool last = l + 1 == activations.size();
    if ((activations[l] == Activation::kSoftmax) != last) {
      return absl::InvalidArgumentError(
          "softmax must be used exactly on the output layer");
    }
  }
  return absl::OkStatus();
}

LayerLayout ModelParams::layout() const {
  LayerLayout layout;
  if (layers.empty()) return layout;
  layout.sizes.push_back(layers.front().inputs);
  for (const DenseLayer& layer : layers) {
    layout.sizes.push_back(layer.outputs);
    layout.activations.push_back(layer.activation);
  }
  return layout;
}

size_t ModelParams::parameter_count() const {
  size_t n = 0;
  for (const DenseLayer& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

bool ModelParams::AllFinite() const {
  for (const DenseLayer& layer : layers) {
    for (double v : layer.weights) if (!std::isfinite(v)) return false;
    for (double v : layer.bias) if (!std::isfinite(v)) return false;
  }
  return true;
}

bool ModelParams::SameShape(const ModelParams& other) const {
  return layout() == other.layout();
}

absl::Status OptimizerConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("learning rate must be positive, got ", learning_rate));
  }
  if (batch_size < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("batch size must be >= 1, got ", batch_size));
  }
  if (kind == Kind::kAdam &&
      !(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 &&
        epsilon > 0.0)) {
    return absl::InvalidArgumentError("Adam betas must lie in [0, 1), eps > 0");
  }
  return absl::OkStatus();
}

absl::StatusOr<ModelParams> InitParams(const LayerLayout& layout,
                                       uint64_t seed) {
  LDPFL_RETURN_IF_ERROR(layout.Validate());
  Engine engine = MakeEngine(seed, streams::kInit);
  ModelParams params;
  for (size_t l = 0; l < layout.num_layers(); ++l) {
    DenseLayer layer;
    layer.inputs = layout.sizes[l];
    layer.outputs = layout.sizes[l + 1];
    layer.activation = layout.activations[l];
    const double scale = std::sqrt(6.0 / layer.inputs);
    layer.weights.resize(static_cast<size_t>(layer.inputs) * layer.outputs);
    for (double& w : layer.weights) w = (2.0 * UniformUnit(engine) - 1.0) * scale;
    layer.bias.assign(layer.outputs, 0.0);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

absl::StatusOr<std::vector<double>> Forward(const ModelParams& params,
                                            std::span<const double> input) {
  LDPFL_RETURN_IF_ERROR(CheckInput(params, input.size()));
  Workspace ws(params);
  std::copy(input.begin(), input.end(), ws.post[0].begin());
  ForwardInPlace(params, ws, params.layers.size());
  return ws.post.back();
}

absl::StatusOr<FeatureVector> ExtractFeatures(const ModelParams& params,
                                              std::span<const double> input,
                                              int tap_layer) {
  LDPFL_RETURN_IF_ERROR(CheckInput(params, input.size()));
  if (tap_layer < 0 ||
      tap_layer >= static_cast<int>(params.layers.size())) {
    return absl::InvalidArgumentError(
        absl::StrCat("tap layer ", tap_layer, " is outside [0, ",
                     params.layers.size(), ")"));
  }
  Workspace ws(params);
  std::copy(input.begin(), input.end(), ws.post[0].begin());
  ForwardInPlace(params, ws, static_cast<size_t>(tap_layer));
  return ws.post[tap_layer];
}

absl::StatusOr<double> CrossEntropyLoss(const ModelParams& params,
                                        std::span<const double> input,
                                        int label) {
  LDPFL_RETURN_IF_ERROR(CheckInput(params, input.size()));
  if (label < 0 || label >= params.layers.back().outputs) {
    return absl::InvalidArgumentError(absl::StrCat("label ", label, " out of range"));
  }
  Workspace ws(params);
  std::copy(input.begin(), input.end(), ws.post[0].begin());
  ForwardInPlace(params, ws, params.layers.size());
  return LogitsLoss(ws.pre.back(), label);
}

absl::StatusOr<ModelParams> LossGradient(const ModelParams& params,
                                         std::span<const double> input,
                                         int label) {
  LDPFL_RETURN_IF_ERROR(CheckInput(params, input.size()));
  if (label < 0 || label >= params.layers.back().outputs) {
    return absl::InvalidArgumentError(absl::StrCat("label ", label, " out of range"));
  }
  Workspace ws(params);
  ModelParams grad = ZerosLike(params);
  AccumulateGradient(params, input, label, ws, grad);
  return grad;
}

absl::StatusOr<ModelParams> Train(const ModelParams& params,
                                  const Dataset& rows,
                                  const OptimizerConfig& opt, int epochs,
                                  uint64_t seed) {
  LDPFL_RETURN_IF_ERROR(opt.Validate());
  LDPFL_RETURN_IF_ERROR(CheckRows(params, rows));
  if (epochs < 0) {
    return absl::InvalidArgumentError(absl::StrCat("epochs must be >= 0, got ", epochs));
  }
  ModelParams model = params;
  if (epochs == 0 || rows.empty()) return model;

  Workspace ws(model);
  ModelParams grad = ZerosLike(model);
  std::vector<double> m1;
  std::vector<double> m2;
  if (opt.kind == OptimizerConfig::Kind::kAdam) {
    m1.assign(model.parameter_count(), 0.0);
    m2.assign(model.parameter_count(), 0.0);
  }
  int64_t step = 0;
  std::vector<size_t> order(rows.size());

  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Engine engine(DeriveSeed(seed, static_cast<uint64_t>(epoch)));
    std::shuffle(order.begin(), order.end(), engine);

    for (size_t start = 0, batch = 0; start < order.size();
         start += opt.batch_size, ++batch) {
      const size_t end = std::min(order.size(), start + opt.batch_size);
      SetZero(grad);
      double batch_loss = 0.0;
      for (size_t k = start; k < end; ++k) {
        const size_t r = order[k];
        batch_loss += AccumulateGradient(model, rows.Row(r), rows.labels[r], ws, grad);
      }
      const double count = static_cast<double>(end - start);
      batch_loss /= count;
      if (!std::isfinite(batch_loss)) {
        return absl::AbortedError(absl::StrCat(
            "training diverged at epoch ", epoch, " batch ", batch,
            " (loss ", batch_loss, ")"));
      }

      ++step;
      if (opt.kind == OptimizerConfig::Kind::kSgd) {
        const double lr = opt.learning_rate / count;
        ForEachParam(model, grad, [lr](double& w, double g, size_t) { w -= lr * g; });
      } else {
        const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
        ForEachParam(model, grad, [&](double& w, double g, size_t k) {
          g /= count;
          m1[k] = opt.beta1 * m1[k] + (1.0 - opt.beta1) * g;
          m2[k] = opt.beta2 * m2[k] + (1.0 - opt.beta2) * g * g;
          const double mhat = m1[k] / c1;
          const double vhat = m2[k] / c2;
          w -= opt.learning_rate * mhat / (std::sqrt(vhat) + opt.epsilon);
        });
      }
    }
  }
  if (!model.AllFinite()) {
    return absl::AbortedError("training produced non-finite parameters");
  }
  return model;
}

absl::StatusOr<EvalMetrics> Evaluate(const ModelParams& params,
                                     const Dataset& rows) {
  if (rows.empty()) {
    return absl::InvalidArgumentError("cannot evaluate on an empty dataset");
  }
  LDPFL_RETURN_IF_ERROR(CheckRows(params, rows));
  Workspace ws(params);
  size_t correct = 0;
  double loss = 0.0;
  for (size_t r = 0; r < rows.size(); ++r) {
    const auto row = rows.Row(r);
    std::copy(row.begin(), row.end(), ws.post[0].begin());
    ForwardInPlace(params, ws, params.layers.size());
    const std::vector<double>& probs = ws.post.back();
    const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
    if (best == rows.labels[r]) ++correct;
    loss += LogitsLoss(ws.pre.back(), rows.labels[r]);
  }
  EvalMetrics metrics;
  metrics.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  metrics.loss = loss / static_cast<double>(rows.size());
  return metrics;
}

}  // namespace ldpfl
