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

#ifndef NUMUR_EVAL_HPP_
#define NUMUR_EVAL_HPP_

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "numur/corpus.hpp"
#include "numur/partition.hpp"
#include "numur/score_model.hpp"

namespace numur {

// A query's pool in descending score order; ties go to the smaller doc id.
struct RankedList {
  std::string query_id;
  std::vector<std::string> docs;
  std::vector<double> scores;
};

RankedList Rank(const Model& m, const Dataset& d, const std::string& query_id);

// 1 / (1-based position of the first doc satisfying `is_target`), or 0.
double ReciprocalRank(const RankedList& ranked,
                      const std::function<bool(const std::string&)>& is_target);

struct ForgetMrr {
  double value = 0.0;
  std::size_t evaluated = 0;
  // Queries of Q_F whose removal target never appears in their pool.
  std::size_t excluded = 0;
};

/// Forget-set MRR used as the unlearning stopping metric.
///
/// Averages 1/rank over Q_F. Under query removal the rank is that of the
/// first positive document of the query; under document removal it is the
/// rank of the first document of the ranking that belongs to D'.
ForgetMrr MrrForget(const Model& m, const Dataset& d, const Partition& p,
                    const ForgetSpec& spec);

struct SetMrr {
  double value = 0.0;
  std::size_t evaluated = 0;
  // Queries of the set with no positive sample; not scored.
  std::size_t skipped = 0;
  bool empty() const { return evaluated == 0; }
};

// Classical MRR over the distinct queries of `samples`. Relevant documents are
// the positives within `samples`; ranks are taken in the full pool.
SetMrr MrrSet(const Model& m, const Dataset& d, const std::vector<Sample>& samples);

struct SetMetrics {
  double forget = 0.0;
  double entangled = 0.0;
  double disjoint = 0.0;
  double test = 0.0;
  std::size_t forget_excluded = 0;
};

SetMetrics EvaluateSets(const Model& m, const CorpusSplit& split, const Partition& p,
                        const ForgetSpec& spec);

struct MetricsReport {
  std::string method;
  double mrr_forget = 0.0;
  double mrr_entangled = 0.0;
  double mrr_disjoint = 0.0;
  double mrr_test = 0.0;
  std::size_t forget_excluded = 0;
  double normalized_forget = 0.0;
  double normalized_epoch_duration = 0.0;
  double total_unlearn_time = 0.0;
  int epochs_run = 0;
  bool stopped_early = false;
  std::size_t edit_count = 0;
  double delta_target = 0.0;
};

double NormalizedForget(double unlearn_forget_mrr, double retrain_test_mrr);
double NormalizedForget(const MetricsReport& unlearned, const MetricsReport& retrain);

struct TimingMetrics {
  double normalized_epoch_duration = 0.0;
  double total_unlearn_time = 0.0;
};

TimingMetrics ComputeTiming(const std::vector<double>& train_epoch_seconds,
                            const std::vector<double>& unlearn_epoch_seconds,
                            int epochs_run);

struct ScoreDistribution {
  std::string model;
  std::string set;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  // 10th, 20th, ..., 90th percentiles (linear interpolation).
  std::array<double, 9> deciles{};

  double spread() const { return max - min; }
};

using NamedModel = std::pair<std::string, const Model*>;
using NamedSet = std::pair<std::string, std::vector<Sample>>;

std::vector<ScoreDistribution> ScoreDistributions(const std::vector<NamedModel>& models,
                                                  const Dataset& d,
                                                  const std::vector<NamedSet>& sets);

// Worker count for evaluation: NUMUR_THREADS when set and positive, else 1.
int EvalThreads();

}  // namespace numur

#endif  // NUMUR_EVAL_HPP_
