// Copyright 2026 The narm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "narm/errors.hpp"
#include "narm/snapshot.hpp"
#include "narm/synthetic.hpp"
#include "temp_dir.hpp"

namespace narm {
namespace {

using testing::TempDir;

Sampler fitted_sampler(ModelKind kind) {
  PlantedConfig config;
  config.n_nodes = 30;
  config.directedness = kind == ModelKind::sym ? Directedness::undirected : Directedness::directed;
  config.seed = 5;
  const auto data = planted_partition(config);
  ModelConfig model;
  model.kind = kind;
  model.n_factors = 3;
  Sampler sampler(model, data.network, data.attributes, nullptr, 5);
  for (int n = 0; n < 5; ++n) sampler.sweep();
  return sampler;
}

class SnapshotRoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(SnapshotRoundTrip, ReloadsBitExactly) {
  const auto sampler = fitted_sampler(GetParam());
  const auto snap = make_snapshot(sampler);
  TempDir dir;
  write_snapshot(dir / "snap.tsv", snap);
  const auto back = read_snapshot(dir / "snap.tsv");
  EXPECT_EQ(back.kind, snap.kind);
  EXPECT_EQ(back.scalars, snap.scalars);
  ASSERT_EQ(back.blocks.size(), snap.blocks.size());
  for (const auto& [name, block] : snap.blocks) {
    EXPECT_TRUE(back.block(name) == block) << name;
  }
  EXPECT_EQ(format_snapshot(back), format_snapshot(snap));
  EXPECT_EQ(back.scalar("sweep"), 5.0);
}

TEST_P(SnapshotRoundTrip, ProbabilitiesMatchTheSampler) {
  const auto sampler = fitted_sampler(GetParam());
  const auto snap = make_snapshot(sampler);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i == j) continue;
      EXPECT_DOUBLE_EQ(snap.link_probability(i, j), sampler.link_probability(i, j));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(BothModels, SnapshotRoundTrip,
                         ::testing::Values(ModelKind::sym, ModelKind::asym));

TEST(Snapshot, MissingBlocksAndScalarsThrow) {
  const auto snap = make_snapshot(fitted_sampler(ModelKind::sym));
  EXPECT_THROW(snap.block("theta"), DataError);
  EXPECT_THROW(snap.scalar("no-such-scalar"), DataError);
}

TEST(Snapshot, MalformedFilesAreRejected) {
  TempDir dir;
  EXPECT_THROW(read_snapshot(dir / "absent.tsv"), DataError);
  EXPECT_THROW(read_snapshot(dir.write("bad-magic.tsv", "not-a-snapshot\t1\n")), DataError);
  EXPECT_THROW(read_snapshot(dir.write("short.tsv",
                                       "narm-snapshot\t1\nmodel\tsym\n[phi]\t2\t2\n1\t2\n")),
               DataError);
  EXPECT_THROW(read_snapshot(dir.write("text.tsv",
                                       "narm-snapshot\t1\nmodel\tsym\n[r]\t1\t2\n1\tx\n")),
               DataError);
}

TEST(TraceCsv, WritesHeaderAndRows) {
  TempDir dir;
  write_trace_csv(dir / "trace.csv", {{10, -12.5, 3.25, 0.5}, {20, -11.0, 3.0, 0.25}});
  EXPECT_EQ(testing::read_file(dir / "trace.csv"),
            "sweep,log_likelihood,block_mass,seconds\n10,-12.5,3.25,0.5\n20,-11,3,0.25\n");
}

}  // namespace
}  // namespace narm
