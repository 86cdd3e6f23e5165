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

#include "ldpfl/data.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "ldpfl/random.h"

namespace ldpfl {
namespace {

constexpr uint32_t kIdxImageMagic = 0x00000803;
constexpr uint32_t kIdxLabelMagic = 0x00000801;

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

uint32_t ReadBigEndian32(const std::string& bytes, size_t offset) {
  uint32_t v = 0;
  for (size_t i = 0; i < 4; ++i) {
    v = (v << 8) | static_cast<uint8_t>(bytes[offset + i]);
  }
  return v;
}

void AppendBigEndian32(std::string& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xff));
  }
}

absl::Status FormatError(const std::string& path, size_t offset,
                         const std::string& what) {
  return absl::DataLossError(
      absl::StrCat(path, " at byte offset ", offset, ": ", what));
}

absl::StatusOr<double> ParseDouble(absl::string_view cell) {
  cell = absl::StripAsciiWhitespace(cell);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    return absl::DataLossError(
        absl::StrCat("non-numeric cell '", cell, "'"));
  }
  return v;
}

absl::Status WriteFile(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

// Largest-remainder rounding of `total * weights` into integer counts.
std::vector<size_t> Apportion(size_t total, const std::vector<double>& weights) {
  std::vector<size_t> counts(weights.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  size_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] * static_cast<double>(total);
    counts[i] = static_cast<size_t>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (size_t k = 0; assigned < total && k < remainders.size(); ++k) {
    ++counts[remainders[k].second];
    ++assigned;
  }
  return counts;
}

}  // namespace

void Dataset::AddRow(std::span<const double> row, int label) {
  values.insert(values.end(), row.begin(), row.end());
  labels.push_back(label);
}

absl::Status Dataset::Validate() const {
  if (values.size() != labels.size() * dims) {
    return absl::FailedPreconditionError(
        absl::StrCat("dataset holds ", values.size(), " values for ",
                     labels.size(), " rows of width ", dims));
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", i, " has label ", labels[i], " outside [0, ", num_classes,
          ")"));
    }
  }
  return absl::OkStatus();
}

Dataset Subset(const Dataset& ds, std::span<const size_t> indices) {
  Dataset out;
  out.dims = ds.dims;
  out.num_classes = ds.num_classes;
  out.values.reserve(indices.size() * ds.dims);
  out.labels.reserve(indices.size());
  for (size_t i : indices) out.AddRow(ds.Row(i), ds.labels[i]);
  return out;
}

absl::StatusOr<Dataset> LoadIdx(const std::string& images_path,
                                const std::string& labels_path) {
  auto images_or = ReadFile(images_path);
  if (!images_or.ok()) return images_or.status();
  auto labels_or = ReadFile(labels_path);
  if (!labels_or.ok()) return labels_or.status();
  const std::string& images = *images_or;
  const std::string& labels = *labels_or;

  if (images.size() < 16) {
    return FormatError(images_path, images.size(), "truncated IDX header");
  }
  if (ReadBigEndian32(images, 0) != kIdxImageMagic) {
    return FormatError(images_path, 0, "bad image magic");
  }
  if (labels.size() < 8) {
    return FormatError(labels_path, labels.size(), "truncated IDX header");
  }
  if (ReadBigEndian32(labels, 0) != kIdxLabelMagic) {
    return FormatError(labels_path, 0, "bad label magic");
  }
  const uint32_t count = ReadBigEndian32(images, 4);
  const uint32_t rows = ReadBigEndian32(images, 8);
  const uint32_t cols = ReadBigEndian32(images, 12);
  const uint32_t label_count = ReadBigEndian32(labels, 4);
  if (label_count != count) {
    return FormatError(labels_path, 4,
                       absl::StrCat("label count ", label_count,
                                    " does not match image count ", count));
  }
  const size_t dims = static_cast<size_t>(rows) * cols;
  const size_t expected_images = 16 + static_cast<size_t>(count) * dims;
  if (images.size() != expected_images) {
    return FormatError(images_path, std::min(images.size(), expected_images),
                       absl::StrCat("expected ", expected_images,
                                    " bytes, file has ", images.size()));
  }
  if (labels.size() != 8 + static_cast<size_t>(count)) {
    return FormatError(labels_path, std::min<size_t>(labels.size(), 8 + count),
                       absl::StrCat("expected ", 8 + count, " bytes, file has ",
                                    labels.size()));
  }

  Dataset ds;
  ds.dims = dims;
  ds.values.resize(static_cast<size_t>(count) * dims);
  ds.labels.resize(count);
  for (size_t i = 0; i < ds.values.size(); ++i) {
    ds.values[i] = static_cast<uint8_t>(images[16 + i]) / 255.0;
  }
  int max_label = -1;
  for (size_t i = 0; i < count; ++i) {
    ds.labels[i] = static_cast<uint8_t>(labels[8 + i]);
    max_label = std::max(max_label, ds.labels[i]);
  }
  ds.num_classes = max_label + 1;
  return ds;
}

absl::Status WriteIdx(const Dataset& ds, uint32_t rows, uint32_t cols,
                      const std::string& images_path,
                      const std::string& labels_path) {
  if (static_cast<size_t>(rows) * cols != ds.dims) {
    return absl::InvalidArgumentError(absl::StrCat(
        "image shape ", rows, "x", cols, " does not match width ", ds.dims));
  }
  std::string images;
  AppendBigEndian32(images, kIdxImageMagic);
  AppendBigEndian32(images, static_cast<uint32_t>(ds.size()));
  AppendBigEndian32(images, rows);
  AppendBigEndian32(images, cols);
  for (double v : ds.values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    images.push_back(static_cast<char>(std::lround(clamped * 255.0)));
  }
  std::string labels;
  AppendBigEndian32(labels, kIdxLabelMagic);
  AppendBigEndian32(labels, static_cast<uint32_t>(ds.size()));
  for (int label : ds.labels) labels.push_back(static_cast<char>(label));
  if (auto s = WriteFile(images_path, images); !s.ok()) return s;
  return WriteFile(labels_path, labels);
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path,
                                const std::string& label_column) {
  auto text_or = ReadFile(path);
  if (!text_or.ok()) return text_or.status();
  std::vector<absl::string_view> lines =
      absl::StrSplit(absl::string_view(*text_or), '\n', absl::SkipWhitespace());
  if (lines.empty()) {
    return absl::DataLossError(absl::StrCat(path, ": missing header row"));
  }
  std::vector<absl::string_view> header = absl::StrSplit(lines[0], ',');
  int label_index = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (absl::StripAsciiWhitespace(header[i]) == label_column) {
      label_index = static_cast<int>(i);
    }
  }
  if (label_index < 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ": no column named '", label_column, "' in header"));
  }

  Dataset ds;
  ds.dims = header.size() - 1;
  std::vector<double> row(ds.dims);
  int max_label = -1;
  for (size_t line = 1; line < lines.size(); ++line) {
    std::vector<absl::string_view> cells = absl::StrSplit(lines[line], ',');
    if (cells.size() != header.size()) {
      return absl::DataLossError(absl::StrCat(
          path, ":", line + 1, ": expected ", header.size(), " cells, got ",
          cells.size()));
    }
    int label = 0;
    size_t k = 0;
    for (size_t c = 0; c < cells.size(); ++c) {
      auto v = ParseDouble(cells[c]);
      if (!v.ok()) {
        return absl::DataLossError(
            absl::StrCat(path, ":", line + 1, ": ", v.status().message()));
      }
      if (static_cast<int>(c) == label_index) {
        if (*v < 0 || *v != std::floor(*v)) {
          return absl::DataLossError(absl::StrCat(
              path, ":", line + 1, ": label must be a non-negative integer"));
        }
        label = static_cast<int>(*v);
      } else {
        row[k++] = *v;
      }
    }
    max_label = std::max(max_label, label);
    ds.AddRow(row, label);
  }
  ds.num_classes = max_label + 1;
  return ds;
}

absl::Status WriteCsv(const Dataset& ds, const std::string& path,
                      const std::string& label_column) {
  std::ostringstream out;
  out.precision(17);
  for (size_t j = 0; j < ds.dims; ++j) out << "f" << j << ",";
  out << label_column << "\n";
  for (size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.Row(i)) out << v << ",";
    out << ds.labels[i] << "\n";
  }
  return WriteFile(path, out.str());
}

absl::StatusOr<Dataset> SynthBlobs(int classes, int per_class, int dims,
                                   double spread, uint64_t seed) {
  if (classes < 1 || per_class < 1 || dims < 1 || !(spread >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "blob parameters must be positive: classes=", classes,
        " per_class=", per_class, " dims=", dims, " spread=", spread));
  }
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> means(classes, std::vector<double>(dims));
  for (auto& mean : means) {
    for (double& v : mean) v = normal(engine);
  }
  Dataset ds;
  ds.dims = static_cast<size_t>(dims);
  ds.num_classes = classes;
  std::vector<double> row(dims);
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      for (int j = 0; j < dims; ++j) {
        row[j] = means[c][j] + spread * normal(engine);
      }
      ds.AddRow(row, c);
    }
  }
  return ds;
}

absl::StatusOr<PartitionPlan> PartitionEqual(const Dataset& ds, int clients,
                                             uint64_t seed) {
  if (clients < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("client count must be >= 1, got ", clients));
  }
  if (static_cast<size_t>(clients) > ds.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot split ", ds.size(), " rows across ", clients, " clients"));
  }
  std::vector<size_t> order(ds.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Engine engine = MakeEngine(seed, streams::kPartition);
  std::shuffle(order.begin(), order.end(), engine);

  const size_t group = ds.size() / static_cast<size_t>(clients);
  PartitionPlan plan;
  plan.mode = PartitionMode::kEqual;
  plan.clients.resize(clients);
  for (int c = 0; c < clients; ++c) {
    plan.clients[c].assign(order.begin() + c * group,
                           order.begin() + (c + 1) * group);
  }
  return plan;
}

absl::StatusOr<PartitionPlan> PartitionNonIid(const Dataset& ds, int clients,
                                              double sparsity, uint64_t seed) {
  if (clients < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("client count must be >= 1, got ", clients));
  }
  if (!(sparsity > 0.0 && sparsity <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sparsity must lie in (0, 1], got ", sparsity));
  }
  if (static_cast<size_t>(clients) > ds.size()) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "only ", ds.size(), " rows for ", clients, " clients"));
  }

  Engine engine = MakeEngine(seed, streams::kPartition);
  std::vector<std::vector<size_t>> by_class(ds.num_classes);
  for (size_t i = 0; i < ds.size(); ++i) by_class[ds.labels[i]].push_back(i);

  PartitionPlan plan;
  plan.mode = PartitionMode::kNonIid;
  plan.sparsity = sparsity;
  plan.clients.resize(clients);

  const bool uniform = sparsity >= 1.0;
  const double concentration = uniform ? 0.0 : sparsity / (1.0 - sparsity);
  std::gamma_distribution<double> gamma(uniform ? 1.0 : concentration, 1.0);
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), engine);
    std::vector<double> weights(clients, 1.0 / clients);
    if (!uniform) {
      double total = 0.0;
      // Tiny shapes can underflow every draw to zero; redraw in that case.
      while (!(total > 0.0)) {
        total = 0.0;
        for (double& w : weights) {
          w = gamma(engine);
          total += w;
        }
      }
      for (double& w : weights) w /= total;
    }
    const std::vector<size_t> counts = Apportion(rows.size(), weights);
    size_t next = 0;
    for (int c = 0; c < clients; ++c) {
      plan.clients[c].insert(plan.clients[c].end(), rows.begin() + next,
                             rows.begin() + next + counts[c]);
      next += counts[c];
    }
  }

  // Every client needs at least one row to train on.
  for (auto& rows : plan.clients) {
    if (!rows.empty()) continue;
    auto largest = std::max_element(
        plan.clients.begin(), plan.clients.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    rows.push_back(largest->back());
    largest->pop_back();
  }
  return plan;
}

std::pair<std::vector<size_t>, std::vector<size_t>> LocalSplit(
    size_t rows, double train_fraction, uint64_t seed, int client_id) {
  std::vector<size_t> order(rows);
  std::iota(order.begin(), order.end(), size_t{0});
  Engine engine(DeriveSeed(DeriveSeed(seed, streams::kSplit),
                           static_cast<uint64_t>(client_id)));
  std::shuffle(order.begin(), order.end(), engine);
  size_t train = static_cast<size_t>(
      std::llround(train_fraction * static_cast<double>(rows)));
  if (rows >= 2) train = std::clamp<size_t>(train, 1, rows - 1);
  train = std::min(train, rows);
  std::vector<size_t> train_idx(order.begin(), order.begin() + train);
  std::vector<size_t> test_idx(order.begin() + train, order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {std::move(train_idx), std::move(test_idx)};
}

}  // namespace ldpfl
