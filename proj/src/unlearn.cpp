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

#include "numur/unlearn.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "numur/error.hpp"
#include "numur/eval.hpp"
#include "numur/unlearn_losses.hpp"

namespace numur {

const char* MethodName(Method m) {
  switch (m) {
    case Method::kCoCoL: return "cocol";
    case Method::kCF: return "cf";
    case Method::kAmnesiac: return "amnesiac";
    case Method::kNegGrad: return "neggrad";
    case Method::kSSD: return "ssd";
    case Method::kBadT: return "badt";
  }
  return "unknown";
}

Method ParseMethod(const std::string& name) {
  for (Method m : AllMethods()) {
    if (name == MethodName(m)) return m;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
}

const std::vector<Method>& AllMethods() {
  static const std::vector<Method> kAll = {Method::kCoCoL, Method::kCF,  Method::kAmnesiac,
                                           Method::kNegGrad, Method::kSSD, Method::kBadT};
  return kAll;
}

void UnlearnConfig::Validate() const {
  if (!(delta_target > 0.0 && delta_target <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "delta_target must lie in (0, 1]");
  }
  if (max_epochs < 1) Fail(ErrorCode::kInvalidArgument, "max_epochs must be >= 1");
  if (check_every < 1) Fail(ErrorCode::kInvalidArgument, "check_every must be >= 1");
  if (learning_rate && !(*learning_rate >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "learning_rate must be >= 0");
  }
  if (!(params.ssd_alpha > 0.0) || !(params.ssd_lambda > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "SSD alpha and lambda must be positive");
  }
  training.Validate();
}

std::vector<double> UnlearnRun::epoch_seconds() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < trajectory.size(); ++i) out.push_back(trajectory[i].wall_time_s);
  if (out.empty() && !trajectory.empty()) out.push_back(trajectory.front().wall_time_s);
  return out;
}

RevisedPair SwapLabels(const RevisedPair& pair) {
  return {pair.query_id, pair.demoted, pair.promoted};
}

namespace {

using Clock = std::chrono::steady_clock;

EpochRecord Measure(const Model& m, const UnlearnTask& task, int epoch, double seconds) {
  const SetMetrics metrics = EvaluateSets(m, task.split, task.partition, task.spec);
  return {epoch, metrics.forget, metrics.entangled, metrics.disjoint, metrics.test, seconds};
}

void CheckTask(const UnlearnTask& task) {
  if (task.partition.forget.empty()) {
    Fail(ErrorCode::kInvalidArgument, "forget set is empty; nothing to unlearn");
  }
}

template <typename T>
const T& PickUniform(const std::vector<T>& items, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, items.size() - 1);
  return items[pick(rng)];
}

std::vector<std::size_t> ShuffledIndices(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

/// Shared epoch loop with the MRR stopping rule.
///
/// The starting model is measured first; a target that is already met ends
/// the run before any update. Afterwards the forget MRR is checked every
/// `check_every` epochs and at the final epoch.
template <typename EpochFn>
UnlearnRun RunIterative(const Model& m_train, const UnlearnTask& task,
                        const UnlearnConfig& cfg, EpochFn&& run_epoch) {
  UnlearnRun run;
  run.method = cfg.method;
  run.final_model = m_train;
  run.trajectory.push_back(Measure(run.final_model, task, 0, 0.0));
  if (run.trajectory.back().mrr_forget <= cfg.delta_target) {
    run.stopped_early = true;
    return run;
  }
  std::mt19937_64 rng(cfg.seed);
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto start = Clock::now();
    run_epoch(run.final_model, rng);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    run.trajectory.push_back(Measure(run.final_model, task, epoch, seconds));
    run.epochs_run = epoch;
    const bool check = epoch % cfg.check_every == 0 || epoch == cfg.max_epochs;
    if (check && run.trajectory.back().mrr_forget <= cfg.delta_target) {
      run.stopped_early = true;
      break;
    }
  }
  return run;
}

}  // namespace

UnlearnRun CocolUnlearn(const Model& m_train, const UnlearnTask& task,
                        const UnlearnConfig& cfg, const StepObserver& observer) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  const Partition& p = task.partition;

  std::vector<Sample> disjoint_pos;
  std::vector<Sample> disjoint_neg;
  for (const Sample& s : p.disjoint) (s.positive() ? disjoint_pos : disjoint_neg).push_back(s);
  if (cfg.params.consistent_phase && (disjoint_pos.empty() || disjoint_neg.empty())) {
    Fail(ErrorCode::kInfeasible,
         "disjoint set needs positive and negative samples for the consistent phase");
  }

  const TeacherSnapshot teacher = Snapshot(m_train);
  const TeacherMinCache cache = TeacherMinCache::Build(teacher, d);
  std::vector<std::vector<Sample>> partners;
  partners.reserve(p.forget.size());
  for (const Sample& x : p.forget) partners.push_back(EntangledPartners(p, x));

  const double lr = cfg.effective_learning_rate();
  GradientBuffer<double> buf(m_train);
  return RunIterative(m_train, task, cfg, [&](Model& student, std::mt19937_64& rng) {
    // Phase 1: forget samples, each with one entangled partner when available.
    for (std::size_t i : ShuffledIndices(p.forget.size(), rng)) {
      const Sample& x = p.forget[i];
      std::optional<Sample> partner;
      if (cfg.params.entangled_term && !partners[i].empty()) {
        partner = PickUniform(partners[i], rng);
      }
      if (observer) {
        observer(Phase::kForget, x);
        if (partner) observer(Phase::kForget, *partner);
      }
      buf.clear();
      ContrastiveLoss(cache, teacher, student, d, x, partner, &buf);
      ApplySgd(student, buf, lr);
    }
    if (!cfg.params.consistent_phase) return;
    // Phase 2: disjoint positives, each paired with a random disjoint negative.
    for (std::size_t i : ShuffledIndices(disjoint_pos.size(), rng)) {
      const Sample& pos = disjoint_pos[i];
      const Sample& neg = PickUniform(disjoint_neg, rng);
      if (observer) {
        observer(Phase::kDisjoint, pos);
        observer(Phase::kDisjoint, neg);
      }
      buf.clear();
      ConsistentLoss(teacher, student, d, pos, neg, &buf);
      ApplySgd(student, buf, lr);
    }
  });
}

UnlearnRun CfUnlearn(const Model& m_train, const UnlearnTask& task,
                     const UnlearnConfig& cfg, const StepObserver& observer) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  const PairwiseTrainer trainer(d, task.partition.retained(), cfg.training);
  const double lr = cfg.effective_learning_rate();
  PairObserver pair_observer;
  if (observer) {
    pair_observer = [&](const Sample& pos, const std::string&) {
      observer(Phase::kRetain, pos);
    };
  }
  return RunIterative(m_train, task, cfg, [&](Model& student, std::mt19937_64& rng) {
    trainer.RunEpoch(student, rng, lr, pair_observer);
  });
}

UnlearnRun AmnesiacUnlearn(const Model& m_train, const UnlearnTask& task,
                           const UnlearnConfig& cfg, const StepObserver& observer) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  const Partition& p = task.partition;

  // Pool negatives of every forget query come from the full training set.
  const PairwiseTrainer forget_side(d, d.samples(), cfg.training);
  std::mt19937_64 build_rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  std::vector<RevisedPair> revised;
  std::vector<Sample> revised_source;
  for (const Sample& s : p.forget) {
    if (!s.positive()) continue;
    if (!forget_side.has_negatives(s.query_id)) {
      Fail(ErrorCode::kInfeasible, "forget query '" + s.query_id + "' has an empty pool");
    }
    for (int k = 0; k < cfg.training.negatives_per_positive; ++k) {
      revised.push_back({s.query_id, forget_side.SampleNegative(s.query_id, build_rng), s.doc_id});
      revised_source.push_back(s);
    }
  }

  std::vector<Sample> entangled_pos;
  for (const Sample& s : p.entangled) {
    if (s.positive()) entangled_pos.push_back(s);
  }
  std::optional<PairwiseTrainer> entangled_side;
  if (!entangled_pos.empty()) entangled_side.emplace(d, p.entangled, cfg.training);

  const double lr = cfg.effective_learning_rate();
  const double margin = cfg.training.margin;
  GradientBuffer<double> buf(m_train);
  // Steps 0..|revised|-1 are label-swapped forget pairs, the rest entangled
  // positives with freshly drawn negatives.
  const std::size_t steps = revised.size() + entangled_pos.size() *
                                                 static_cast<std::size_t>(cfg.training.negatives_per_positive);
  return RunIterative(m_train, task, cfg, [&](Model& student, std::mt19937_64& rng) {
    for (std::size_t step : ShuffledIndices(steps, rng)) {
      buf.clear();
      if (step < revised.size()) {
        const RevisedPair& r = revised[step];
        if (observer) observer(Phase::kForget, revised_source[step]);
        PairwiseHinge(student, TokenSpan(d.query(r.query_id).tokens),
                      TokenSpan(d.document(r.promoted).tokens),
                      TokenSpan(d.document(r.demoted).tokens), margin, &buf);
      } else {
        const std::size_t k = (step - revised.size()) /
                              static_cast<std::size_t>(cfg.training.negatives_per_positive);
        const Sample& pos = entangled_pos[k];
        if (observer) observer(Phase::kRetain, pos);
        const std::string& neg = entangled_side->SampleNegative(pos.query_id, rng);
        PairwiseHinge(student, TokenSpan(d.query(pos.query_id).tokens),
                      TokenSpan(d.document(pos.doc_id).tokens),
                      TokenSpan(d.document(neg).tokens), margin, &buf);
      }
      ApplySgd(student, buf, lr);
    }
  });
}

UnlearnRun NegGradUnlearn(const Model& m_train, const UnlearnTask& task,
                          const UnlearnConfig& cfg, const StepObserver& observer) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  std::vector<Sample> forget_pos;
  for (const Sample& s : task.partition.forget) {
    if (s.positive()) forget_pos.push_back(s);
  }
  const PairwiseTrainer sampler(d, d.samples(), cfg.training);
  const double lr = cfg.effective_learning_rate();
  GradientBuffer<double> buf(m_train);
  return RunIterative(m_train, task, cfg, [&](Model& student, std::mt19937_64& rng) {
    for (std::size_t i : ShuffledIndices(forget_pos.size(), rng)) {
      const Sample& pos = forget_pos[i];
      if (observer) observer(Phase::kForget, pos);
      const TokenSpan q(d.query(pos.query_id).tokens);
      const TokenSpan dp(d.document(pos.doc_id).tokens);
      for (int k = 0; k < cfg.training.negatives_per_positive; ++k) {
        const std::string& neg = sampler.SampleNegative(pos.query_id, rng);
        // Ascent on the pairwise margin term, taken as active everywhere:
        // the clamped hinge has no gradient on pairs M_train already separates.
        buf.clear();
        BackwardScore(student, q, dp, -1.0, buf);
        BackwardScore(student, q, TokenSpan(d.document(neg).tokens), 1.0, buf);
        ApplySgd(student, buf, -lr);
      }
    }
  });
}

UnlearnRun SsdUnlearn(const Model& m_train, const UnlearnTask& task,
                      const UnlearnConfig& cfg) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  const auto start = Clock::now();

  std::set<std::pair<std::string, std::string>> forget_pairs;
  for (const Sample& s : task.partition.forget) forget_pairs.emplace(s.query_id, s.doc_id);

  const PairwiseTrainer sampler(d, d.samples(), cfg.training);
  using Matrix = Model::Matrix;
  Matrix imp_fq = Matrix::Zero(m_train.vocab_size(), m_train.dim());
  Matrix imp_fd = imp_fq;
  Matrix imp_sq = imp_fq;
  Matrix imp_sd = imp_fq;
  std::size_t n_forget = 0;
  std::size_t n_all = 0;

  // Per-sample gradient of the mean hinge over the sample's negatives; its
  // square feeds the diagonal importance estimate of both F and S.
  std::mt19937_64 rng(cfg.seed);
  GradientBuffer<double> buf(m_train);
  const double scale = 1.0 / cfg.training.negatives_per_positive;
  for (const Sample& pos : sampler.positives()) {
    const TokenSpan q(d.query(pos.query_id).tokens);
    const TokenSpan dp(d.document(pos.doc_id).tokens);
    buf.clear();
    for (int k = 0; k < cfg.training.negatives_per_positive; ++k) {
      const std::string& neg = sampler.SampleNegative(pos.query_id, rng);
      PairwiseHinge(m_train, q, dp, TokenSpan(d.document(neg).tokens), cfg.training.margin,
                    &buf);
    }
    const bool in_forget = forget_pairs.count({pos.query_id, pos.doc_id}) > 0;
    for (TokenId t : buf.touched_q()) {
      const auto sq = (buf.grad_q().row(t) * scale).array().square().matrix();
      imp_sq.row(t) += sq;
      if (in_forget) imp_fq.row(t) += sq;
    }
    for (TokenId t : buf.touched_d()) {
      const auto sq = (buf.grad_d().row(t) * scale).array().square().matrix();
      imp_sd.row(t) += sq;
      if (in_forget) imp_fd.row(t) += sq;
    }
    ++n_all;
    if (in_forget) ++n_forget;
  }

  UnlearnRun run;
  run.method = cfg.method;
  run.final_model = m_train;
  if (n_forget > 0) {
    imp_fq /= static_cast<double>(n_forget);
    imp_fd /= static_cast<double>(n_forget);
    imp_sq /= static_cast<double>(n_all);
    imp_sd /= static_cast<double>(n_all);
    auto dampen = [&](Matrix& params, const Matrix& imp_f, const Matrix& imp_s) {
      for (Eigen::Index i = 0; i < params.size(); ++i) {
        const double f = imp_f.data()[i];
        const double s = imp_s.data()[i];
        if (f > cfg.params.ssd_alpha * s) {
          params.data()[i] *= std::min(cfg.params.ssd_lambda * s / f, 1.0);
          ++run.edit_count;
        }
      }
    };
    dampen(run.final_model.embed_q(), imp_fq, imp_sq);
    dampen(run.final_model.embed_d(), imp_fd, imp_sd);
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  run.trajectory.push_back(Measure(run.final_model, task, 0, seconds));
  run.stopped_early = run.trajectory.back().mrr_forget <= cfg.delta_target;
  return run;
}

UnlearnRun BadTUnlearn(const Model& m_train, const UnlearnTask& task,
                       const UnlearnConfig& cfg, const StepObserver& observer) {
  cfg.Validate();
  CheckTask(task);
  const Dataset& d = task.split.train;
  const TeacherSnapshot competent = Snapshot(m_train);
  const TeacherSnapshot incompetent = Snapshot(InitialModel(d.vocab_size(), cfg.training));

  std::set<std::pair<std::string, std::string>> forget_pairs;
  for (const Sample& s : task.partition.forget) forget_pairs.emplace(s.query_id, s.doc_id);
  const std::vector<Sample>& all = d.samples();

  const double lr = cfg.effective_learning_rate();
  GradientBuffer<double> buf(m_train);
  return RunIterative(m_train, task, cfg, [&](Model& student, std::mt19937_64& rng) {
    for (std::size_t i : ShuffledIndices(all.size(), rng)) {
      const Sample& s = all[i];
      const bool forget = forget_pairs.count({s.query_id, s.doc_id}) > 0;
      if (observer) observer(forget ? Phase::kForget : Phase::kRetain, s);
      buf.clear();
      AbsDeltaLoss(forget ? incompetent : competent, student, d, s, &buf);
      ApplySgd(student, buf, lr);
    }
  });
}

UnlearnRun Unlearn(const Model& m_train, const UnlearnTask& task, const UnlearnConfig& cfg,
                   const StepObserver& observer) {
  switch (cfg.method) {
    case Method::kCoCoL: return CocolUnlearn(m_train, task, cfg, observer);
    case Method::kCF: return CfUnlearn(m_train, task, cfg, observer);
    case Method::kAmnesiac: return AmnesiacUnlearn(m_train, task, cfg, observer);
    case Method::kNegGrad: return NegGradUnlearn(m_train, task, cfg, observer);
    case Method::kSSD: return SsdUnlearn(m_train, task, cfg);
    case Method::kBadT: return BadTUnlearn(m_train, task, cfg, observer);
  }
  Fail(ErrorCode::kInvalidArgument, "unknown method");
}

Destinations ComputeDestinations(const Model& m_retrain, const UnlearnTask& task) {
  Destinations out;
  out.d1 = MrrForget(m_retrain, task.split.train, task.partition, task.spec).value;
  out.d2 = MrrSet(m_retrain, task.split.test, task.split.test.samples()).value;
  out.d3 = out.d2 / 2.0;
  return out;
}

}  // namespace numur
