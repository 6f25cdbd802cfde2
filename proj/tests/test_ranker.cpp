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


#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "numur/error.hpp"
#include "numur/ranker.hpp"

using namespace numur;
using namespace numur::testing;

TEST_CASE("pairwise hinge gradient matches central differences") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> tok(0, 19), len(1, 4);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 100; ++trial) {
    const Model m = Model::Random(20, 5, 300 + trial, 0.9);
    std::vector<TokenId> q(len(rng)), pos(len(rng)), neg(len(rng));
    for (auto* v : {&q, &pos, &neg})
      for (auto& t : *v) t = tok(rng);
    const double margin = 1.0;
    const double arg = margin - Forward(m, TokenSpan(q), TokenSpan(pos)) +
                       Forward(m, TokenSpan(q), TokenSpan(neg));
    if (arg <= 1e-3) continue;  // inactive or at the kink
    GradientBuffer<double> buf(m);
    PairwiseHinge(m, TokenSpan(q), TokenSpan(pos), TokenSpan(neg), margin, &buf);
    auto loss = [&](const Model& mm) {
      return PairwiseHinge(mm, TokenSpan(q), TokenSpan(pos), TokenSpan(neg), margin, nullptr);
    };
    CHECK(GradientRelativeError(m, loss, buf, RowsOf({&q, &pos, &neg})) <= 1e-4);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("training on the synthetic corpus reaches a train MRR of 0.9") {
  const CorpusSplit split = GenerateSynthetic({});
  const TrainResult r = Train(split, {});
  REQUIRE(r.trajectory.size() == 30);
  CHECK(r.trajectory.back().train_mrr >= 0.9);
  CHECK(r.trajectory.back().loss < r.trajectory.front().loss);
  CHECK(r.model.all_finite());
}

TEST_CASE("zero epochs return the initialisation") {
  const CorpusSplit split = GenerateSynthetic({});
  TrainConfig cfg;
  cfg.epochs = 0;
  CHECK(Train(split, cfg).model == InitialModel(split.train.vocab_size(), cfg));
}

TEST_CASE("training is deterministic for a seed") {
  const CorpusSplit split = GenerateSynthetic({});
  TrainConfig cfg;
  cfg.epochs = 3;
  CHECK(Train(split, cfg).model == Train(split, cfg).model);
  TrainConfig other = cfg;
  other.seed = 8;
  CHECK_FALSE(Train(split, other).model == Train(split, cfg).model);
}

TEST_CASE("pairwise loss does not increase on one query with two documents") {
  const Dataset d = Dataset::Create(6, {{"q", {0, 1}}}, {{"p", {2}}, {"n", {3, 4}}},
                                    {Pos("q", "p"), Neg("q", "n")}, {{"q", {"n", "p"}}});
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 25;
  cfg.negatives_per_positive = 1;
  cfg.init_scale = 0.5;
  const TrainResult r = TrainOn(d, d.samples(), cfg);
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    CHECK(r.trajectory[i].loss <= r.trajectory[i - 1].loss + 1e-12);
  }
}

TEST_CASE("retraining touches only retained samples") {
  const Dataset d = Figure2();
  const CorpusSplit split{d, d};
  const Partition p = MakePartition(d, {RemovalKind::kDocument, {"d2", "d3"}});
  std::set<std::pair<std::string, std::string>> positives;
  bool negative_in_forget = false;
  TrainConfig cfg;
  cfg.epochs = 3;
  Retrain(split, cfg, p, [&](const Sample& pos, const std::string& neg) {
    positives.insert({pos.query_id, pos.doc_id});
    for (const auto& f : p.forget) {
      negative_in_forget |= f.query_id == pos.query_id && f.doc_id == neg;
    }
  });
  CHECK(positives == std::set<std::pair<std::string, std::string>>{
                         {"q1", "d1"}, {"q4", "d4"}, {"q5", "d5"}});
  CHECK_FALSE(negative_in_forget);
}

TEST_CASE("a fully forgotten query contributes no updates") {
  const CorpusSplit split = GenerateSynthetic({});
  const std::string victim = split.train.sample_query_ids().front();
  const Partition p = MakePartition(split.train, {RemovalKind::kQuery, {victim}});
  TrainConfig cfg;
  cfg.epochs = 2;
  bool touched = false;
  Retrain(split, cfg, p, [&](const Sample& pos, const std::string&) {
    touched |= pos.query_id == victim;
  });
  CHECK_FALSE(touched);
}

TEST_CASE("a query without negatives is infeasible") {
  const Dataset d =
      Dataset::Create(4, {{"q", {0}}}, {{"a", {1}}}, {Pos("q", "a")}, {{"q", {"a"}}});
  CHECK_THROWS_AS(TrainOn(d, d.samples(), {}), Error);
  TrainConfig bad;
  bad.margin = 0.0;
  CHECK_THROWS_AS(bad.Validate(), Error);
}
