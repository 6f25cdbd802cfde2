// Copyright 2026 The numur Authors.
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


#include "doctest.h"
#include "fixtures.hpp"
#include "numur/error.hpp"
#include "numur/partition.hpp"
#include "numur/report.hpp"

using namespace numur;
using namespace numur::testing;

TEST_CASE("document removal of d2 and d3 reproduces the published split") {
  const Dataset d = Figure2();
  const Partition p = MakePartition(d, {RemovalKind::kDocument, {"d2", "d3"}});
  CHECK(p.forget == std::vector<Sample>{Pos("q1", "d2"), Pos("q2", "d2"), Pos("q3", "d2"),
                                        Pos("q4", "d3")});
  CHECK(p.entangled == std::vector<Sample>{Pos("q1", "d1"), Pos("q4", "d4")});
  CHECK(p.disjoint == std::vector<Sample>{Pos("q5", "d5")});
  CHECK(p.forget_queries == std::set<std::string>{"q1", "q2", "q3", "q4"});
}

TEST_CASE("query removal of q1 and q2 follows the shared-id reading") {
  const Dataset d = Figure2();
  const Partition p = MakePartition(d, {RemovalKind::kQuery, {"q1", "q2"}});
  CHECK(p.forget == std::vector<Sample>{Pos("q1", "d1"), Pos("q1", "d2"), Pos("q2", "d2")});
  CHECK(p.entangled == std::vector<Sample>{Pos("q3", "d2")});
  CHECK(p.disjoint == std::vector<Sample>{Pos("q4", "d3"), Pos("q4", "d4"), Pos("q5", "d5")});
}

TEST_CASE("removing every query but an isolated one leaves it disjoint") {
  const Dataset d = Figure2();
  const Partition p = MakePartition(d, {RemovalKind::kQuery, {"q1", "q2", "q3", "q4"}});
  CHECK(p.entangled.empty());
  CHECK(p.disjoint == std::vector<Sample>{Pos("q5", "d5")});
}

TEST_CASE("entangled partners") {
  const Dataset d = Figure2();
  const Partition p = MakePartition(d, {RemovalKind::kDocument, {"d2", "d3"}});
  CHECK(EntangledPartners(p, Pos("q1", "d2")) == std::vector<Sample>{Pos("q1", "d1")});
  CHECK(EntangledPartners(p, Pos("q3", "d2")).empty());
  CHECK(EntangledPartners(p, Pos("q4", "d3")) == std::vector<Sample>{Pos("q4", "d4")});
  CHECK_THROWS_AS(EntangledPartners(p, Pos("q5", "d5")), Error);
}

TEST_CASE("invalid specs are refused") {
  const Dataset d = Figure2();
  ForgetSpec unknown{RemovalKind::kQuery, {"q9"}};
  CHECK_THROWS_AS(unknown.Validate(d), Error);
  CHECK_THROWS_AS(MakePartition(d, unknown), Error);
  ForgetSpec all{RemovalKind::kQuery, {"q1", "q2", "q3", "q4", "q5"}};
  CHECK_THROWS_AS(MakePartition(d, all), Error);
}

TEST_CASE("partition matches the double-scan oracle on random datasets") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Dataset d = RandomDataset(rng);
    const RemovalKind kind = trial % 2 ? RemovalKind::kQuery : RemovalKind::kDocument;
    const auto spec = RandomSpec(rng, d, kind);
    if (!spec) continue;
    const OraclePartition want = BruteForcePartition(d, *spec);
    if (want.entangled.empty() && want.disjoint.empty()) continue;
    const Partition got = MakePartition(d, *spec);
    CHECK(got.forget == want.forget);
    CHECK(got.entangled == want.entangled);
    CHECK(got.disjoint == want.disjoint);
    CHECK(got.size() == d.samples().size());
    for (const auto& s : got.retained()) {
      CHECK_FALSE(spec->contains(kind == RemovalKind::kQuery ? s.query_id : s.doc_id));
    }
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("sampled specs cover about the requested share of positive pairs") {
  const CorpusSplit split = GenerateSynthetic({});
  std::size_t positives = 0;
  for (const auto& s : split.train.samples()) positives += s.positive();
  for (RemovalKind kind : {RemovalKind::kDocument, RemovalKind::kQuery}) {
    const ForgetSpec spec = SampleForgetSpec(split.train, kind, 0.25, 7);
    std::size_t covered = 0;
    for (const auto& s : MakePartition(split.train, spec).forget) covered += s.positive();
    CHECK(static_cast<double>(covered) >= 0.2 * positives);
    CHECK(static_cast<double>(covered) <= 0.3 * positives);
    CHECK(SampleForgetSpec(split.train, kind, 0.25, 7).ids == spec.ids);
  }
}

TEST_CASE("forget spec JSON round trip") {
  const auto dir = ScratchDir("spec_json");
  const ForgetSpec spec{RemovalKind::kDocument, {"d2", "d3"}};
  SaveForgetSpec(spec, dir / "spec.json");
  const ForgetSpec back = LoadForgetSpec(dir / "spec.json");
  CHECK(back.kind == spec.kind);
  CHECK(back.ids == spec.ids);
  WriteTextFile(dir / "bad.json", "{\"kind\":\"paragraph\",\"ids\":[\"d1\"]}");
  CHECK_THROWS_AS(LoadForgetSpec(dir / "bad.json"), Error);
}
