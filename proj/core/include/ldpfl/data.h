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

#ifndef LDPFL_DATA_H_
#define LDPFL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace ldpfl {

// Row-major labelled feature matrix.
struct Dataset {
  size_t dims = 0;
  int num_classes = 0;
  std::vector<double> values;  // size() * dims entries
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  std::span<const double> Row(size_t i) const {
    return std::span<const double>(values).subspan(i * dims, dims);
  }
  void AddRow(std::span<const double> row, int label);

  // Shape and label-range check.
  absl::Status Validate() const;
};

// Rows `indices` of `ds`, in the given order.
Dataset Subset(const Dataset& ds, std::span<const size_t> indices);

// IDX image file (magic 0x00000803, big-endian dims) plus IDX label file
// (magic 0x00000801). Pixels are scaled to [0, 1].
absl::StatusOr<Dataset> LoadIdx(const std::string& images_path,
                                const std::string& labels_path);
// Writes `ds` as IDX with the given image shape; values are mapped back from
// [0, 1] to bytes. rows * cols must equal ds.dims.
absl::Status WriteIdx(const Dataset& ds, uint32_t rows, uint32_t cols,
                      const std::string& images_path,
                      const std::string& labels_path);

// Numeric CSV with a header row; `label_column` names the integer label.
absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const std::string& label_column);
absl::Status WriteCsv(const Dataset& ds, const std::string& path,
                      const std::string& label_column = "label");

// Gaussian clusters: class means ~ N(0, I), rows = mean + spread * N(0, I).
// Rows are grouped by class.
absl::StatusOr<Dataset> SynthBlobs(int classes, int per_class, int dims,
                                   double spread, uint64_t seed);

enum class PartitionMode { kEqual, kNonIid };

struct PartitionPlan {
  PartitionMode mode = PartitionMode::kEqual;
  double sparsity = 1.0;
  std::vector<std::vector<size_t>> clients;
};

// Shuffles row indices and deals floor(T/N) rows to each of N clients.
// Leftover rows are dropped.
absl::StatusOr<PartitionPlan> PartitionEqual(const Dataset& ds, int clients,
                                             uint64_t seed);

// Per-class Dirichlet allocation over clients with concentration
// sparsity / (1 - sparsity). sparsity = 1 splits every class evenly; small
// values concentrate each class on few clients.
absl::StatusOr<PartitionPlan> PartitionNonIid(const Dataset& ds, int clients,
                                              double sparsity, uint64_t seed);

// Deterministic local split of `rows` row positions into (train, test)
// positions, derived from (seed, client_id). Both parts are non-empty when
// rows >= 2.
std::pair<std::vector<size_t>, std::vector<size_t>> LocalSplit(
    size_t rows, double train_fraction, uint64_t seed, int client_id);

inline constexpr double kLocalTrainFraction = 0.9;

}  // namespace ldpfl

#endif  // LDPFL_DATA_H_
