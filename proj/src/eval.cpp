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

#include "numur/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "numur/error.hpp"

namespace numur {

int EvalThreads() {
  if (const char* env = std::getenv("NUMUR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

namespace {

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// the caller's in-order reduction is independent of the worker count.
template <typename Fn>
void ParallelFor(std::size_t n, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(EvalThreads()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

RankedList Rank(const Model& m, const Dataset& d, const std::string& query_id) {
  const Query& q = d.query(query_id);
  const auto& pool = d.pool(query_id);
  if (pool.empty()) Fail(ErrorCode::kInvalidArgument, "empty pool for '" + query_id + "'");

  const DenseVector<double> pooled_q = MeanPool(m.embed_q(), TokenSpan(q.tokens));
  std::vector<std::size_t> order(pool.size());
  std::vector<double> scores(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Document& doc = d.document(pool[i]);
    scores[i] = Softplus(pooled_q.dot(MeanPool(m.embed_d(), TokenSpan(doc.tokens))));
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pool[a] < pool[b];
  });
  RankedList out;
  out.query_id = query_id;
  out.docs.reserve(pool.size());
  out.scores.reserve(pool.size());
  for (std::size_t i : order) {
    out.docs.push_back(pool[i]);
    out.scores.push_back(scores[i]);
  }
  return out;
}

double ReciprocalRank(const RankedList& ranked,
                      const std::function<bool(const std::string&)>& is_target) {
  for (std::size_t i = 0; i < ranked.docs.size(); ++i) {
    if (is_target(ranked.docs[i])) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

ForgetMrr MrrForget(const Model& m, const Dataset& d, const Partition& p,
                    const ForgetSpec& spec) {
  if (p.forget_queries.empty()) {
    Fail(ErrorCode::kInvalidArgument, "forget MRR needs a non-empty Q_F");
  }
  std::map<std::string, std::set<std::string>> forget_positives;
  for (const Sample& s : p.forget) {
    if (s.positive()) forget_positives[s.query_id].insert(s.doc_id);
  }
  const std::vector<std::string> queries(p.forget_queries.begin(), p.forget_queries.end());
  std::vector<double> rr(queries.size(), -1.0);
  ParallelFor(queries.size(), [&](std::size_t i) {
    const std::string& qid = queries[i];
    std::function<bool(const std::string&)> is_target;
    if (spec.kind == RemovalKind::kQuery) {
      auto it = forget_positives.find(qid);
      if (it == forget_positives.end()) return;
      const auto& targets = it->second;
      is_target = [&targets](const std::string& did) { return targets.count(did) > 0; };
    } else {
      is_target = [&spec](const std::string& did) { return spec.contains(did); };
    }
    const RankedList ranked = Rank(m, d, qid);
    const double value = ReciprocalRank(ranked, is_target);
    if (value > 0.0) rr[i] = value;
  });
  ForgetMrr out;
  double sum = 0.0;
  for (double v : rr) {
    if (v < 0.0) {
      ++out.excluded;
    } else {
      sum += v;
      ++out.evaluated;
    }
  }
  if (out.evaluated > 0) out.value = sum / static_cast<double>(out.evaluated);
  return out;
}

SetMrr MrrSet(const Model& m, const Dataset& d, const std::vector<Sample>& samples) {
  std::map<std::string, std::set<std::string>> relevant;
  for (const Sample& s : samples) {
    auto& r = relevant[s.query_id];
    if (s.positive()) r.insert(s.doc_id);
  }
  std::vector<const std::string*> queries;
  std::vector<const std::set<std::string>*> targets;
  SetMrr out;
  for (const auto& [qid, docs] : relevant) {
    if (docs.empty()) {
      ++out.skipped;
      continue;
    }
    queries.push_back(&qid);
    targets.push_back(&docs);
  }
  std::vector<double> rr(queries.size(), 0.0);
  ParallelFor(queries.size(), [&](std::size_t i) {
    const auto& t = *targets[i];
    rr[i] = ReciprocalRank(Rank(m, d, *queries[i]),
                           [&t](const std::string& did) { return t.count(did) > 0; });
  });
  out.evaluated = queries.size();
  if (out.evaluated > 0) {
    out.value = std::accumulate(rr.begin(), rr.end(), 0.0) /
                static_cast<double>(out.evaluated);
  }
  return out;
}

SetMetrics EvaluateSets(const Model& m, const CorpusSplit& split, const Partition& p,
                        const ForgetSpec& spec) {
  SetMetrics out;
  if (!p.forget_queries.empty()) {
    const ForgetMrr f = MrrForget(m, split.train, p, spec);
    out.forget = f.value;
    out.forget_excluded = f.excluded;
  }
  out.entangled = MrrSet(m, split.train, p.entangled).value;
  out.disjoint = MrrSet(m, split.train, p.disjoint).value;
  out.test = MrrSet(m, split.test, split.test.samples()).value;
  return out;
}

double NormalizedForget(double unlearn_forget_mrr, double retrain_test_mrr) {
  return 1.0 - std::abs(unlearn_forget_mrr - retrain_test_mrr);
}

double NormalizedForget(const MetricsReport& unlearned, const MetricsReport& retrain) {
  return NormalizedForget(unlearned.mrr_forget, retrain.mrr_test);
}

TimingMetrics ComputeTiming(const std::vector<double>& train_epoch_seconds,
                            const std::vector<double>& unlearn_epoch_seconds,
                            int epochs_run) {
  if (train_epoch_seconds.empty() || unlearn_epoch_seconds.empty()) {
    Fail(ErrorCode::kInvalidArgument, "timing metrics need non-empty epoch time lists");
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  const double train_mean = mean(train_epoch_seconds);
  TimingMetrics out;
  out.normalized_epoch_duration = train_mean > 0.0 ? mean(unlearn_epoch_seconds) / train_mean : 0.0;
  out.total_unlearn_time = out.normalized_epoch_duration * epochs_run;
  return out;
}

namespace {

double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<ScoreDistribution> ScoreDistributions(const std::vector<NamedModel>& models,
                                                  const Dataset& d,
                                                  const std::vector<NamedSet>& sets) {
  std::vector<ScoreDistribution> out;
  for (const auto& [model_name, model] : models) {
    for (const auto& [set_name, samples] : sets) {
      ScoreDistribution dist;
      dist.model = model_name;
      dist.set = set_name;
      dist.count = samples.size();
      if (!samples.empty()) {
        std::vector<double> scores;
        scores.reserve(samples.size());
        for (const Sample& s : samples) {
          scores.push_back(Forward(*model, d, s.query_id, s.doc_id));
        }
        std::sort(scores.begin(), scores.end());
        dist.min = scores.front();
        dist.max = scores.back();
        dist.mean = std::accumulate(scores.begin(), scores.end(), 0.0) /
                    static_cast<double>(scores.size());
        for (int k = 0; k < 9; ++k) dist.deciles[k] = Quantile(scores, (k + 1) / 10.0);
      }
      out.push_back(dist);
    }
  }
  return out;
}

}  // namespace numur
