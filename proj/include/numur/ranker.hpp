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

#ifndef NUMUR_RANKER_HPP_
#define NUMUR_RANKER_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "numur/corpus.hpp"
#include "numur/partition.hpp"
#include "numur/score_model.hpp"

namespace numur {

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 30;
  double margin = 1.0;
  std::uint64_t seed = 7;
  int negatives_per_positive = 4;
  int dim = 16;
  double init_scale = 0.1;

  void Validate() const;
};

// Fresh parameters M_init for `cfg.seed`.
Model InitialModel(int vocab_size, const TrainConfig& cfg);

// max(0, margin − f(q,d⁺) + f(q,d⁻)); gradients go to `buf` when active.
double PairwiseHinge(const Model& m, TokenSpan query, TokenSpan pos_doc,
                     TokenSpan neg_doc, double margin, GradientBuffer<double>* buf);

// Called once per (positive sample, negative doc) SGD step.
using PairObserver = std::function<void(const Sample& positive, const std::string& negative_doc)>;

/// Pairwise hinge SGD restricted to a subset of a dataset.
///
/// Positives come from `allowed`. Negatives for query q are drawn from q's
/// pool: any document that is not a positive of q and whose (q, d) sample,
/// if one exists, is itself in `allowed`.
class PairwiseTrainer {
 public:
  PairwiseTrainer(const Dataset& d, const std::vector<Sample>& allowed,
                  const TrainConfig& cfg);

  // One pass over the shuffled positives with negatives_per_positive steps
  // each. Returns the mean hinge loss measured before every step.
  double RunEpoch(Model& m, std::mt19937_64& rng, double learning_rate,
                  const PairObserver& observer = nullptr) const;

  // Draws one negative document for `query_id`.
  const std::string& SampleNegative(const std::string& query_id,
                                    std::mt19937_64& rng) const;

  const std::vector<Sample>& positives() const { return positives_; }
  bool has_negatives(const std::string& query_id) const;

 private:
  const Dataset* data_;
  TrainConfig cfg_;
  std::vector<Sample> positives_;
  std::map<std::string, std::vector<std::string>> negatives_;
};

struct TrainEpoch {
  int epoch = 0;
  double loss = 0.0;
  double train_mrr = 0.0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<TrainEpoch> trajectory;

  std::vector<double> epoch_seconds() const;
};

// M_train: pairwise training on the whole training set.
TrainResult Train(const CorpusSplit& split, const TrainConfig& cfg,
                  const PairObserver& observer = nullptr);

// M_retrain: the same procedure from the same M_init, fitted on E ∪ D only.
TrainResult Retrain(const CorpusSplit& split, const TrainConfig& cfg, const Partition& p,
                    const PairObserver& observer = nullptr);

// Shared core of Train and Retrain.
TrainResult TrainOn(const Dataset& d, const std::vector<Sample>& samples,
                    const TrainConfig& cfg, const PairObserver& observer = nullptr);

}  // namespace numur

#endif  // NUMUR_RANKER_HPP_
