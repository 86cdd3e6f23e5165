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
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace ldpfl {
namespace {

namespace fs = std::filesystem;

std::string TempPath(const std::string& name) {
  return (fs::temp_directory_path() / ("ldpfl_data_test_" + name)).string();
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<size_t> Flatten(const PartitionPlan& plan) {
  std::vector<size_t> all;
  for (const auto& c : plan.clients) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  return all;
}

TEST(DatasetTest, ValidateCatchesShapeAndLabels) {
  Dataset ds;
  ds.dims = 2;
  ds.num_classes = 2;
  ds.AddRow(std::vector<double>{1, 2}, 1);
  EXPECT_TRUE(ds.Validate().ok());
  ds.labels.push_back(0);
  EXPECT_EQ(ds.Validate().code(), absl::StatusCode::kFailedPrecondition);
  ds.values.insert(ds.values.end(), {3, 4});
  ds.labels.back() = 2;
  EXPECT_EQ(ds.Validate().code(), absl::StatusCode::kInvalidArgument);
}

TEST(SynthBlobsTest, ShapeAndDeterminism) {
  const Dataset a = *SynthBlobs(4, 25, 3, 0.5, 8);
  EXPECT_EQ(a.size(), 100u);
  EXPECT_EQ(a.dims, 3u);
  EXPECT_EQ(a.num_classes, 4);
  EXPECT_EQ(a.values, SynthBlobs(4, 25, 3, 0.5, 8)->values);
  EXPECT_FALSE(SynthBlobs(0, 25, 3, 0.5, 8).ok());
}

TEST(IdxTest, RoundTrip) {
  Dataset ds;
  ds.dims = 4;
  ds.num_classes = 3;
  ds.AddRow(std::vector<double>{0, 1, 0.2, 0.4}, 2);
  ds.AddRow(std::vector<double>{1, 0, 0.6, 0.8}, 0);
  const std::string img = TempPath("img.idx"), lbl = TempPath("lbl.idx");
  ASSERT_TRUE(WriteIdx(ds, 2, 2, img, lbl).ok());
  const Dataset back = *LoadIdx(img, lbl);
  EXPECT_EQ(back.dims, 4u);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.num_classes, 3);
  for (size_t i = 0; i < ds.values.size(); ++i) {
    EXPECT_NEAR(back.values[i], ds.values[i], 0.5 / 255.0);
  }
  EXPECT_EQ(back.values[1], 1.0);
}

TEST(IdxTest, CorruptFilesAreDataLossWithOffset) {
  Dataset ds;
  ds.dims = 4;
  ds.num_classes = 2;
  ds.AddRow(std::vector<double>{0, 1, 0, 1}, 1);
  const std::string img = TempPath("img2.idx"), lbl = TempPath("lbl2.idx");
  ASSERT_TRUE(WriteIdx(ds, 2, 2, img, lbl).ok());
  {
    std::ifstream in(img, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    bytes.resize(bytes.size() - 2);
    WriteText(img, bytes);
  }
  const absl::Status s = LoadIdx(img, lbl).status();
  EXPECT_EQ(s.code(), absl::StatusCode::kDataLoss);
  EXPECT_THAT(std::string(s.message()), ::testing::HasSubstr("offset"));
  WriteText(img, "garbage-garbage-garbage");
  EXPECT_EQ(LoadIdx(img, lbl).status().code(), absl::StatusCode::kDataLoss);
  EXPECT_EQ(LoadIdx(TempPath("missing"), lbl).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(CsvTest, RoundTripAndLabelColumn) {
  const Dataset ds = *SynthBlobs(3, 4, 2, 0.5, 1);
  const std::string path = TempPath("rt.csv");
  ASSERT_TRUE(WriteCsv(ds, path).ok());
  const Dataset back = *LoadCsv(path, "label");
  EXPECT_EQ(back.values, ds.values);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(LoadCsv(path, "target").status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(CsvTest, LabelMayBeAnyColumn) {
  const std::string path = TempPath("first.csv");
  WriteText(path, "y,a,b\n1,0.5,2\n0,1.5,3\n");
  const Dataset ds = *LoadCsv(path, "y");
  EXPECT_EQ(ds.dims, 2u);
  EXPECT_THAT(ds.labels, ::testing::ElementsAre(1, 0));
  EXPECT_THAT(ds.values, ::testing::ElementsAre(0.5, 2, 1.5, 3));
}

TEST(CsvTest, MalformedRowsReportLine) {
  const std::string path = TempPath("bad.csv");
  WriteText(path, "a,label\n1,0\n2\n");
  absl::Status s = LoadCsv(path, "label").status();
  EXPECT_EQ(s.code(), absl::StatusCode::kDataLoss);
  EXPECT_THAT(std::string(s.message()), ::testing::HasSubstr(":3:"));
  WriteText(path, "a,label\nabc,0\n");
  EXPECT_EQ(LoadCsv(path, "label").status().code(), absl::StatusCode::kDataLoss);
}

TEST(PartitionEqualTest, DisjointEqualGroups) {
  const Dataset ds = *SynthBlobs(5, 21, 2, 0.5, 1);  // 105 rows
  const PartitionPlan plan = *PartitionEqual(ds, 4, 3);
  ASSERT_EQ(plan.clients.size(), 4u);
  for (const auto& c : plan.clients) EXPECT_EQ(c.size(), 26u);
  const auto all = Flatten(plan);
  EXPECT_EQ(std::set<size_t>(all.begin(), all.end()).size(), all.size());
  EXPECT_EQ(all.size(), 104u);
  EXPECT_EQ(PartitionEqual(ds, 4, 3)->clients, plan.clients);
  EXPECT_EQ(PartitionEqual(ds, 0, 3).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(PartitionEqual(ds, 200, 3).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(PartitionNonIidTest, CoversEveryRowOnceAndNoClientEmpty) {
  const Dataset ds = *SynthBlobs(10, 30, 2, 0.5, 1);
  for (double s : {0.1, 0.5, 1.0}) {
    const PartitionPlan plan = *PartitionNonIid(ds, 10, s, 4);
    const auto all = Flatten(plan);
    ASSERT_EQ(all.size(), ds.size());
    for (size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
    for (const auto& c : plan.clients) EXPECT_FALSE(c.empty());
  }
}

TEST(PartitionNonIidTest, LowSparsityDropsClasses) {
  const Dataset ds = *SynthBlobs(10, 50, 2, 0.5, 1);
  int skewed = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const PartitionPlan plan = *PartitionNonIid(ds, 10, 0.1, seed);
    bool any = false;
    for (const auto& c : plan.clients) {
      std::set<int> classes;
      for (size_t i : c) classes.insert(ds.labels[i]);
      any |= classes.size() <= 7;
    }
    skewed += any;
  }
  EXPECT_EQ(skewed, 100);
}

TEST(PartitionNonIidTest, ErrorsAndFullSparsityIsBalanced) {
  const Dataset ds = *SynthBlobs(2, 5, 2, 0.5, 1);
  EXPECT_EQ(PartitionNonIid(ds, 11, 0.5, 1).status().code(),
            absl::StatusCode::kResourceExhausted);
  EXPECT_EQ(PartitionNonIid(ds, 2, 0.0, 1).status().code(),
            absl::StatusCode::kInvalidArgument);
  const PartitionPlan plan = *PartitionNonIid(ds, 5, 1.0, 1);
  for (const auto& c : plan.clients) EXPECT_EQ(c.size(), 2u);
}

TEST(LocalSplitTest, NinetyTenDisjoint) {
  const auto [train, test] = LocalSplit(100, kLocalTrainFraction, 3, 1);
  EXPECT_EQ(train.size(), 90u);
  EXPECT_EQ(test.size(), 10u);
  std::vector<size_t> all = train;
  all.insert(all.end(), test.begin(), test.end());
  std::sort(all.begin(), all.end());
  for (size_t i = 0; i < all.size(); ++i) EXPECT_EQ(all[i], i);
  const auto [t2, e2] = LocalSplit(2, kLocalTrainFraction, 3, 1);
  EXPECT_EQ(t2.size(), 1u);
  EXPECT_EQ(e2.size(), 1u);
}

}  // namespace
}  // namespace ldpfl
