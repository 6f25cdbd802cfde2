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


// Shared builders and brute-force oracles for the unit and acceptance tests.

#ifndef NUMUR_TESTS_FIXTURES_HPP_
#define NUMUR_TESTS_FIXTURES_HPP_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "numur/corpus.hpp"
#include "numur/eval.hpp"
#include "numur/partition.hpp"
#include "numur/score_model.hpp"

namespace numur::testing {

inline Sample Pos(const std::string& q, const std::string& d) {
  return {q, d, Label::kPositive};
}
inline Sample Neg(const std::string& q, const std::string& d) {
  return {q, d, Label::kNegative};
}

// Seven-sample removal illustration:
// q1:{d1,d2} q2:{d2} q3:{d2} q4:{d3,d4} q5:{d5}, all positive. Every pool
// holds all five documents.
inline Dataset Figure2() {
  std::vector<Query> qs;
  std::vector<Document> ds;
  for (int i = 1; i <= 5; ++i) {
    qs.push_back({"q" + std::to_string(i), {i, 10 + i}});
    ds.push_back({"d" + std::to_string(i), {i, 20 + i, 30 + i}});
  }
  std::vector<Sample> s{Pos("q1", "d1"), Pos("q1", "d2"), Pos("q2", "d2"), Pos("q3", "d2"),
                        Pos("q4", "d3"), Pos("q4", "d4"), Pos("q5", "d5")};
  std::map<std::string, std::vector<std::string>> pools;
  for (const auto& q : qs) pools[q.id] = {"d1", "d2", "d3", "d4", "d5"};
  return Dataset::Create(40, std::move(qs), std::move(ds), std::move(s), std::move(pools));
}

struct RandomDatasetShape {
  int max_queries = 6;
  int max_docs = 8;
  int max_samples = 30;
  int vocab = 24;
  int max_tokens = 4;
};

// Random well-formed dataset: every query has at least one positive, pools
// cover every labelled doc plus a few extras, sample count ≤ max_samples.
inline Dataset RandomDataset(std::mt19937_64& rng, const RandomDatasetShape& shape = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int nq = uni(1, shape.max_queries);
  const int nd = uni(2, shape.max_docs);
  auto tokens = [&]() {
    std::vector<TokenId> t(uni(1, shape.max_tokens));
    for (auto& x : t) x = uni(0, shape.vocab - 1);
    return t;
  };
  std::vector<Query> qs;
  std::vector<Document> ds;
  for (int i = 0; i < nq; ++i) qs.push_back({"q" + std::to_string(i), tokens()});
  for (int i = 0; i < nd; ++i) ds.push_back({"d" + std::to_string(i), tokens()});
  std::vector<Sample> samples;
  std::map<std::string, std::vector<std::string>> pools;
  for (const auto& q : qs) {
    std::vector<int> order(nd);
    for (int i = 0; i < nd; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    const int budget = shape.max_samples - static_cast<int>(samples.size()) -
                       (nq - 1 - static_cast<int>(&q - qs.data()));
    const int k = std::max(1, std::min(uni(1, std::min(nd, 5)), budget));
    for (int i = 0; i < k; ++i) {
      const std::string doc = "d" + std::to_string(order[i]);
      samples.push_back({q.id, doc, i == 0 || uni(0, 1) ? Label::kPositive : Label::kNegative});
    }
    const int pool = std::min(nd, k + uni(0, 3));
    for (int i = 0; i < pool; ++i) pools[q.id].push_back("d" + std::to_string(order[i]));
    std::sort(pools[q.id].begin(), pools[q.id].end());
  }
  return Dataset::Create(shape.vocab, std::move(qs), std::move(ds), std::move(samples),
                         std::move(pools));
}

// Random non-empty spec that does not cover every sample, or nothing when
// the dataset admits none.
inline std::optional<ForgetSpec> RandomSpec(std::mt19937_64& rng, const Dataset& d,
                                            RemovalKind kind) {
  std::vector<std::string> ids;
  for (const auto& s : d.samples()) {
    ids.push_back(kind == RemovalKind::kQuery ? s.query_id : s.doc_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < 2) return std::nullopt;
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto k = std::uniform_int_distribution<std::size_t>(1, ids.size() - 1)(rng);
  ForgetSpec spec{kind, {ids.begin(), ids.begin() + static_cast<long>(k)}};
  return spec;
}

struct OraclePartition {
  std::vector<Sample> forget, entangled, disjoint;
};

// Double scan: every retained sample is compared with every forget sample.
inline OraclePartition BruteForcePartition(const Dataset& d, const ForgetSpec& spec) {
  OraclePartition out;
  auto in_forget = [&](const Sample& s) {
    return spec.ids.count(spec.kind == RemovalKind::kQuery ? s.query_id : s.doc_id) > 0;
  };
  for (const auto& s : d.samples()) {
    if (in_forget(s)) out.forget.push_back(s);
  }
  for (const auto& s : d.samples()) {
    if (in_forget(s)) continue;
    bool shares = false;
    for (const auto& f : out.forget) {
      shares = shares || f.query_id == s.query_id || f.doc_id == s.doc_id;
    }
    (shares ? out.entangled : out.disjoint).push_back(s);
  }
  return out;
}

// Reciprocal rank by enumerating every pool doc and counting how many beat
// the best-placed target under the (score desc, id asc) order.
inline double OracleReciprocalRank(const Model& m, const Dataset& d, const std::string& q,
                                   const std::function<bool(const std::string&)>& target) {
  const auto& pool = d.pool(q);
  std::optional<std::size_t> best;
  for (const auto& t : pool) {
    if (!target(t)) continue;
    const double st = Forward(m, d, q, t);
    std::size_t ahead = 0;
    for (const auto& o : pool) {
      const double so = Forward(m, d, q, o);
      if (so > st || (so == st && o < t)) ++ahead;
    }
    if (!best || ahead < *best) best = ahead;
  }
  return best ? 1.0 / static_cast<double>(*best + 1) : 0.0;
}

// Central-difference check of an analytic gradient over every parameter of
// the rows touched by either the analytic gradient or a probe. Returns
// ||g_a − g_n|| / max(||g_a|| + ||g_n||, tiny).
inline double GradientRelativeError(Model m, const std::function<double(const Model&)>& loss,
                                    const GradientBuffer<double>& analytic,
                                    const std::vector<TokenId>& rows, double step = 1e-5) {
  double diff2 = 0.0, na2 = 0.0, nn2 = 0.0;
  auto probe = [&](EmbeddingMatrix<double>& table, const EmbeddingMatrix<double>& grad,
                   TokenId r) {
    for (int c = 0; c < table.cols(); ++c) {
      const double keep = table(r, c);
      table(r, c) = keep + step;
      const double up = loss(m);
      table(r, c) = keep - step;
      const double down = loss(m);
      table(r, c) = keep;
      const double num = (up - down) / (2 * step);
      const double ana = grad(r, c);
      diff2 += (num - ana) * (num - ana);
      na2 += ana * ana;
      nn2 += num * num;
    }
  };
  for (TokenId r : rows) {
    probe(m.embed_q(), analytic.grad_q(), r);
    probe(m.embed_d(), analytic.grad_d(), r);
  }
  const double denom = std::max(std::sqrt(na2) + std::sqrt(nn2), 1e-12);
  return std::sqrt(diff2) / denom;
}

inline std::vector<TokenId> RowsOf(std::initializer_list<const std::vector<TokenId>*> lists) {
  std::set<TokenId> rows;
  for (const auto* l : lists) rows.insert(l->begin(), l->end());
  return {rows.begin(), rows.end()};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("numur_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace numur::testing

#endif  // NUMUR_TESTS_FIXTURES_HPP_
