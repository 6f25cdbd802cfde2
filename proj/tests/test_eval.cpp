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


#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "fixtures.hpp"
#include "numur/error.hpp"
#include "numur/eval.hpp"

using namespace numur;
using namespace numur::testing;

namespace {

// One-dimensional model: query token 0 weighs 1, document token i has logit
// logits[i - 1].
Model LogitModel(const std::vector<double>& logits) {
  Model m(static_cast<int>(logits.size()) + 1, 1);
  m.embed_q()(0, 0) = 1.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    m.embed_d()(static_cast<Eigen::Index>(i) + 1, 0) = logits[i];
  }
  return m;
}

std::vector<Document> Docs(int n) {
  std::vector<Document> out;
  for (int i = 1; i <= n; ++i) out.push_back({"d" + std::to_string(i), {i}});
  return out;
}

}  // namespace

TEST_CASE("ranking sorts by score and breaks ties by doc id") {
  const Dataset d = Figure2();
  const Model zero(d.vocab_size(), 3);
  CHECK(Rank(zero, d, "q1").docs == std::vector<std::string>{"d1", "d2", "d3", "d4", "d5"});

  const Dataset one = Dataset::Create(3, {{"q", {0}}}, {{"a", {1}}}, {Pos("q", "a")},
                                      {{"q", {"a"}}});
  CHECK(Rank(Model::Random(3, 2, 1), one, "q").docs == std::vector<std::string>{"a"});
  CHECK_THROWS_AS(Rank(zero, d, "q9"), Error);
}

TEST_CASE("ranking agrees with a naive sort on random pools") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Document> docs;
    std::vector<std::string> pool;
    for (int i = 0; i < 10; ++i) {
      docs.push_back({"d" + std::to_string(i), {static_cast<TokenId>(1 + rng() % 6)}});
      pool.push_back("d" + std::to_string(i));
    }
    const Dataset d = Dataset::Create(8, {{"q", {0, 7}}}, docs, {Pos("q", "d0")}, {{"q", pool}});
    const Model m = Model::Random(8, 3, trial);
    std::vector<std::pair<double, std::string>> naive;
    for (const auto& doc : pool) naive.push_back({-Forward(m, d, "q", doc), doc});
    std::sort(naive.begin(), naive.end());
    const RankedList r = Rank(m, d, "q");
    for (std::size_t i = 0; i < pool.size(); ++i) CHECK(r.docs[i] == naive[i].second);
  }
}

TEST_CASE("the worked document-removal example yields 0.25") {
  // Scores put the pool in the order d1, d3, d4, d2 and d2 is removed.
  const Dataset d = Dataset::Create(5, {{"q1", {0}}}, Docs(4), {Pos("q1", "d1"), Pos("q1", "d2")},
                                    {{"q1", {"d1", "d2", "d3", "d4"}}});
  const Model m = LogitModel({4.0, 1.0, 3.0, 2.0});
  CHECK(Rank(m, d, "q1").docs == std::vector<std::string>{"d1", "d3", "d4", "d2"});
  const ForgetSpec spec{RemovalKind::kDocument, {"d2"}};
  const Partition p = MakePartition(d, spec);
  const ForgetMrr f = MrrForget(m, d, p, spec);
  CHECK(f.value == 0.25);
  CHECK(f.evaluated == 1);
}

TEST_CASE("query-removal MRR over targets at ranks 1, 2 and 4") {
  std::vector<Query> qs{{"q1", {0}}, {"q2", {0}}, {"q3", {0}}, {"q4", {0}}};
  std::map<std::string, std::vector<std::string>> pools;
  for (const auto& q : qs) pools[q.id] = {"d1", "d2", "d3", "d4"};
  const Dataset d = Dataset::Create(
      5, qs, Docs(4), {Pos("q1", "d1"), Pos("q2", "d2"), Pos("q3", "d4"), Pos("q4", "d1")},
      pools);
  const Model m = LogitModel({4.0, 3.0, 2.0, 1.0});
  const ForgetSpec spec{RemovalKind::kQuery, {"q1", "q2", "q3"}};
  const ForgetMrr f = MrrForget(m, d, MakePartition(d, spec), spec);
  CHECK(f.value == doctest::Approx((1.0 + 0.5 + 0.25) / 3.0));

  const ForgetSpec first{RemovalKind::kQuery, {"q1"}};
  CHECK(MrrForget(m, d, MakePartition(d, first), first).value == 1.0);
}

TEST_CASE("targets missing from the pool are excluded and counted") {
  // (q2, d4) is a labelled negative that q2's pool does not contain.
  const Dataset d = Dataset::Create(
      5, {{"q1", {0}}, {"q2", {0}}}, Docs(4),
      {Pos("q1", "d1"), Pos("q1", "d4"), Pos("q2", "d2"), Neg("q2", "d4")},
      {{"q1", {"d1", "d2", "d3", "d4"}}, {"q2", {"d2", "d3"}}});
  const Model m = LogitModel({4.0, 3.0, 2.0, 1.0});
  const ForgetSpec spec{RemovalKind::kDocument, {"d4"}};
  const ForgetMrr f = MrrForget(m, d, MakePartition(d, spec), spec);
  CHECK(f.value == 0.25);
  CHECK(f.evaluated == 1);
  CHECK(f.excluded == 1);
}

TEST_CASE("set MRR skips queries without positives") {
  const Dataset d = Figure2();
  const Model zero(d.vocab_size(), 2);
  const SetMrr none = MrrSet(zero, d, {Neg("q1", "d3")});
  CHECK(none.value == 0.0);
  CHECK(none.empty());
  CHECK(none.skipped == 1);
  const SetMrr some = MrrSet(zero, d, {Pos("q5", "d5"), Pos("q1", "d1")});
  CHECK(some.value == doctest::Approx((1.0 + 0.2) / 2.0));
}

TEST_CASE("MRR helpers agree with an exhaustive oracle") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Dataset d = RandomDataset(rng);
    const Model m = Model::Random(d.vocab_size(), 3, trial, trial % 3 ? 0.5 : 0.0);

    std::map<std::string, std::set<std::string>> relevant;
    for (const auto& s : d.samples()) {
      relevant[s.query_id];
      if (s.positive()) relevant[s.query_id].insert(s.doc_id);
    }
    double sum = 0;
    int n = 0;
    for (const auto& [q, docs] : relevant) {
      if (docs.empty()) continue;
      sum += OracleReciprocalRank(m, d, q, [&](const std::string& x) { return docs.count(x); });
      ++n;
    }
    CHECK(MrrSet(m, d, d.samples()).value == doctest::Approx(n ? sum / n : 0.0));

    const RemovalKind kind = trial % 2 ? RemovalKind::kQuery : RemovalKind::kDocument;
    const auto spec = RandomSpec(rng, d, kind);
    if (!spec) continue;
    const OraclePartition o = BruteForcePartition(d, *spec);
    if (o.entangled.empty() && o.disjoint.empty()) continue;
    const Partition p = MakePartition(d, *spec);
    sum = 0;
    n = 0;
    for (const auto& q : p.forget_queries) {
      auto target = [&](const std::string& x) {
        return kind == RemovalKind::kQuery ? d.is_positive(q, x) : spec->contains(x);
      };
      const auto& pool = d.pool(q);
      if (std::none_of(pool.begin(), pool.end(), target)) continue;
      sum += OracleReciprocalRank(m, d, q, target);
      ++n;
    }
    if (n == 0) {
      CHECK_THROWS_AS(MrrForget(m, d, p, *spec), Error);
      continue;
    }
    CHECK(MrrForget(m, d, p, *spec).value == doctest::Approx(sum / n));
  }
}

TEST_CASE("evaluation leaves the model untouched") {
  const CorpusSplit split = GenerateSynthetic({});
  const Model m = Model::Random(split.train.vocab_size(), 4, 1);
  const Model copy = m;
  const ForgetSpec spec = SampleForgetSpec(split.train, RemovalKind::kDocument, 0.25, 7);
  EvaluateSets(m, split, MakePartition(split.train, spec), spec);
  CHECK(m == copy);
}

TEST_CASE("thread count does not change results") {
  const CorpusSplit split = GenerateSynthetic({});
  const Model m = Model::Random(split.train.vocab_size(), 4, 1, 0.5);
  const ForgetSpec spec = SampleForgetSpec(split.train, RemovalKind::kQuery, 0.25, 7);
  const Partition p = MakePartition(split.train, spec);
  setenv("NUMUR_THREADS", "1", 1);
  CHECK(EvalThreads() == 1);
  const SetMetrics one = EvaluateSets(m, split, p, spec);
  setenv("NUMUR_THREADS", "3", 1);
  CHECK(EvalThreads() == 3);
  const SetMetrics three = EvaluateSets(m, split, p, spec);
  unsetenv("NUMUR_THREADS");
  CHECK(EvalThreads() == 1);
  CHECK(one.forget == three.forget);
  CHECK(one.entangled == three.entangled);
  CHECK(one.disjoint == three.disjoint);
  CHECK(one.test == three.test);
}

TEST_CASE("normalised forget and timing formulas") {
  CHECK(NormalizedForget(0.44, 0.44) == 1.0);
  CHECK(NormalizedForget(0.42, 0.44) == doctest::Approx(0.98));
  CHECK(NormalizedForget(0.0, 1.0) == 0.0);

  TimingMetrics same = ComputeTiming({2.0, 2.0}, {2.0}, 4);
  CHECK(same.normalized_epoch_duration == 1.0);
  CHECK(same.total_unlearn_time == 4.0);
  TimingMetrics slow = ComputeTiming({1.0, 1.0, 1.0}, {2.0, 2.0, 2.0}, 3);
  CHECK(slow.normalized_epoch_duration == 2.0);
  CHECK(slow.total_unlearn_time == 6.0);
  CHECK(ComputeTiming({1.0}, {1.0}, 0).total_unlearn_time == 0.0);
  CHECK_THROWS_AS(ComputeTiming({}, {1.0}, 1), Error);
  CHECK_THROWS_AS(ComputeTiming({1.0}, {}, 1), Error);
}

TEST_CASE("score distributions") {
  const Dataset d = Figure2();
  const Model zero(d.vocab_size(), 3);
  const Model rnd = Model::Random(d.vocab_size(), 3, 2, 1.0);
  const auto dists =
      ScoreDistributions({{"init", &zero}, {"rand", &rnd}}, d, {{"all", d.samples()}});
  REQUIRE(dists.size() == 2);
  CHECK(dists[0].model == "init");
  CHECK(dists[0].count == 7);
  CHECK(dists[0].spread() == 0.0);
  CHECK(dists[0].mean == doctest::Approx(std::log(2.0)));
  CHECK(dists[1].spread() > 0.0);
  for (const auto& s : dists) {
    CHECK(s.min <= s.deciles.front());
    CHECK(s.deciles.back() <= s.max);
    for (std::size_t i = 1; i < s.deciles.size(); ++i) CHECK(s.deciles[i - 1] <= s.deciles[i]);
  }
}
