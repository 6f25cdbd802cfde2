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

#include "numur/ranker.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "numur/error.hpp"
#include "numur/eval.hpp"

namespace numur {

void TrainConfig::Validate() const {
  if (!(learning_rate >= 0.0) || epochs < 0 || !(margin > 0.0) ||
      negatives_per_positive < 1 || dim < 1 || !(init_scale >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument,
         "train config needs lr >= 0, epochs >= 0, margin > 0, "
         "negatives_per_positive >= 1, dim >= 1");
  }
}

Model InitialModel(int vocab_size, const TrainConfig& cfg) {
  return Model::Random(vocab_size, cfg.dim, cfg.seed, cfg.init_scale);
}

double PairwiseHinge(const Model& m, TokenSpan query, TokenSpan pos_doc,
                     TokenSpan neg_doc, double margin, GradientBuffer<double>* buf) {
  const double loss = margin - Forward(m, query, pos_doc) + Forward(m, query, neg_doc);
  if (loss <= 0.0) return 0.0;
  if (buf != nullptr) {
    BackwardScore(m, query, pos_doc, -1.0, *buf);
    BackwardScore(m, query, neg_doc, 1.0, *buf);
  }
  return loss;
}

PairwiseTrainer::PairwiseTrainer(const Dataset& d, const std::vector<Sample>& allowed,
                                 const TrainConfig& cfg)
    : data_(&d), cfg_(cfg) {
  cfg_.Validate();
  std::set<std::pair<std::string, std::string>> allowed_pairs;
  for (const Sample& s : allowed) allowed_pairs.emplace(s.query_id, s.doc_id);

  // Dataset order, not `allowed` order, fixes the positive sequence.
  for (const Sample& s : d.samples()) {
    if (s.positive() && allowed_pairs.count({s.query_id, s.doc_id})) {
      positives_.push_back(s);
    }
  }
  for (const Sample& s : positives_) {
    if (negatives_.count(s.query_id)) continue;
    auto& negs = negatives_[s.query_id];
    for (const std::string& did : d.pool(s.query_id)) {
      if (d.is_positive(s.query_id, did)) continue;
      if (d.find_sample(s.query_id, did) && !allowed_pairs.count({s.query_id, did})) continue;
      negs.push_back(did);
    }
    if (negs.empty()) {
      Fail(ErrorCode::kInfeasible, "query '" + s.query_id + "' has no pool negatives");
    }
  }
}

bool PairwiseTrainer::has_negatives(const std::string& query_id) const {
  auto it = negatives_.find(query_id);
  return it != negatives_.end() && !it->second.empty();
}

const std::string& PairwiseTrainer::SampleNegative(const std::string& query_id,
                                                   std::mt19937_64& rng) const {
  const auto& negs = negatives_.at(query_id);
  std::uniform_int_distribution<std::size_t> pick(0, negs.size() - 1);
  return negs[pick(rng)];
}

double PairwiseTrainer::RunEpoch(Model& m, std::mt19937_64& rng, double learning_rate,
                                 const PairObserver& observer) const {
  std::vector<std::size_t> order(positives_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  GradientBuffer<double> buf(m);
  double total = 0.0;
  std::size_t steps = 0;
  for (std::size_t i : order) {
    const Sample& pos = positives_[i];
    const TokenSpan q(data_->query(pos.query_id).tokens);
    const TokenSpan dp(data_->document(pos.doc_id).tokens);
    for (int k = 0; k < cfg_.negatives_per_positive; ++k) {
      const std::string& neg = SampleNegative(pos.query_id, rng);
      if (observer) observer(pos, neg);
      buf.clear();
      total += PairwiseHinge(m, q, dp, TokenSpan(data_->document(neg).tokens), cfg_.margin, &buf);
      ApplySgd(m, buf, learning_rate);
      ++steps;
    }
  }
  return steps ? total / static_cast<double>(steps) : 0.0;
}

std::vector<double> TrainResult::epoch_seconds() const {
  std::vector<double> out;
  for (const TrainEpoch& e : trajectory) out.push_back(e.wall_time_s);
  return out;
}

TrainResult TrainOn(const Dataset& d, const std::vector<Sample>& samples,
                    const TrainConfig& cfg, const PairObserver& observer) {
  cfg.Validate();
  const PairwiseTrainer trainer(d, samples, cfg);
  if (trainer.positives().empty()) {
    Fail(ErrorCode::kInfeasible, "training set has no positive samples");
  }
  TrainResult result;
  result.model = InitialModel(d.vocab_size(), cfg);
  // Offset stream so sampling is not correlated with the initialisation draw.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    TrainEpoch record;
    record.epoch = epoch;
    record.loss = trainer.RunEpoch(result.model, rng, cfg.learning_rate, observer);
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.train_mrr = MrrSet(result.model, d, samples).value;
    result.trajectory.push_back(record);
  }
  return result;
}

TrainResult Train(const CorpusSplit& split, const TrainConfig& cfg,
                  const PairObserver& observer) {
  return TrainOn(split.train, split.train.samples(), cfg, observer);
}

TrainResult Retrain(const CorpusSplit& split, const TrainConfig& cfg, const Partition& p,
                    const PairObserver& observer) {
  return TrainOn(split.train, p.retained(), cfg, observer);
}

}  // namespace numur
