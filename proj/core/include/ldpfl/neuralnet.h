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

#ifndef LDPFL_NEURALNET_H_
#define LDPFL_NEURALNET_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ldpfl/bitcodec.h"
#include "ldpfl/data.h"

namespace ldpfl {

enum class Activation : uint8_t { kRelu = 0, kSigmoid = 1, kSoftmax = 2 };

absl::StatusOr<Activation> ParseActivation(std::string_view name);
std::string_view ActivationName(Activation activation);

// Layer widths (input first) and one activation per dense layer.
struct LayerLayout {
  std::vector<int> sizes;
  std::vector<Activation> activations;

  // ReLU hidden layers and a softmax output.
  static LayerLayout Classifier(std::vector<int> sizes);

  size_t num_layers() const { return activations.size(); }
  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }

  // >= 2 sizes, positive widths, softmax only (and always) on the output.
  absl::Status Validate() const;

  friend bool operator==(const LayerLayout&, const LayerLayout&) = default;
};

struct DenseLayer {
  int inputs = 0;
  int outputs = 0;
  Activation activation = Activation::kRelu;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;     // outputs

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct ModelParams {
  std::vector<DenseLayer> layers;

  LayerLayout layout() const;
  size_t parameter_count() const;
  bool AllFinite() const;
  // True when both models have the same layout.
  bool SameShape(const ModelParams& other) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int batch_size = 32;

  absl::Status Validate() const;
};

struct EvalMetrics {
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross-entropy
};

// Weights ~ U(-s, s) with s = sqrt(6 / fan_in); biases are zero.
absl::StatusOr<ModelParams> InitParams(const LayerLayout& layout,
                                       uint64_t seed);

// Class probabilities for one input.
absl::StatusOr<std::vector<double>> Forward(const ModelParams& params,
                                            std::span<const double> input);

// Activation vector after `tap_layer` dense layers; tap 0 is the input.
// The output layer cannot be tapped.
absl::StatusOr<FeatureVector> ExtractFeatures(const ModelParams& params,
                                              std::span<const double> input,
                                              int tap_layer);

// Cross-entropy of one labelled input.
absl::StatusOr<double> CrossEntropyLoss(const ModelParams& params,
                                        std::span<const double> input,
                                        int label);

// Gradient of CrossEntropyLoss with respect to every weight and bias,
// returned in the shape of `params`.
absl::StatusOr<ModelParams> LossGradient(const ModelParams& params,
                                         std::span<const double> input,
                                         int label);

// Mini-batch cross-entropy training. The row order of epoch e is a shuffle
// drawn from (seed, e). A non-finite batch loss aborts with the epoch and
// batch index.
absl::StatusOr<ModelParams> Train(const ModelParams& params,
                                  const Dataset& rows,
                                  const OptimizerConfig& opt, int epochs,
                                  uint64_t seed);

absl::StatusOr<EvalMetrics> Evaluate(const ModelParams& params,
                                     const Dataset& rows);

}  // namespace ldpfl

#endif  // LDPFL_NEURALNET_H_
