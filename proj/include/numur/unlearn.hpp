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

#ifndef NUMUR_UNLEARN_HPP_
#define NUMUR_UNLEARN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "numur/corpus.hpp"
#include "numur/partition.hpp"
#include "numur/ranker.hpp"
#include "numur/score_model.hpp"

namespace numur {

enum class Method { kCoCoL, kCF, kAmnesiac, kNegGrad, kSSD, kBadT };

const char* MethodName(Method m);
// Accepts the lower-case names printed by MethodName.
Method ParseMethod(const std::string& name);
const std::vector<Method>& AllMethods();

struct MethodParams {
  double ssd_alpha = 10.0;
  double ssd_lambda = 1.0;
  // Ablation switches for CoCoL.
  bool entangled_term = true;
  bool consistent_phase = true;
};

struct UnlearnConfig {
  double delta_target = 0.5;
  int max_epochs = 200;
  // Defaults to half the training learning rate.
  std::optional<double> learning_rate;
  std::uint64_t seed = 7;
  int check_every = 1;
  Method method = Method::kCoCoL;
  MethodParams params;
  // How M_train was fitted: margin, negatives, dim and M_init seed.
  TrainConfig training;

  double effective_learning_rate() const {
    return learning_rate.value_or(training.learning_rate * 0.5);
  }
  void Validate() const;
};

// Everything an unlearning run reads. All members must outlive the run.
struct UnlearnTask {
  const CorpusSplit& split;
  const Partition& partition;
  const ForgetSpec& spec;
};

struct EpochRecord {
  int epoch = 0;
  double mrr_forget = 0.0;
  double mrr_entangled = 0.0;
  double mrr_disjoint = 0.0;
  double mrr_test = 0.0;
  double wall_time_s = 0.0;
};

/// Result of one unlearning run.
///
/// trajectory[0] describes the starting model (for SSD, the edited model);
/// trajectory[e] is measured after epoch e.
struct UnlearnRun {
  Method method = Method::kCoCoL;
  Model final_model;
  int epochs_run = 0;
  bool stopped_early = false;
  std::vector<EpochRecord> trajectory;
  // Parameters rescaled by SSD.
  std::size_t edit_count = 0;

  const EpochRecord& last() const { return trajectory.back(); }
  // Wall time of each executed epoch (SSD: the edit itself).
  std::vector<double> epoch_seconds() const;
};

enum class Phase { kForget, kDisjoint, kRetain };

// Sees every sample a gradient step is computed from.
using StepObserver = std::function<void(Phase, const Sample&)>;

UnlearnRun CocolUnlearn(const Model& m_train, const UnlearnTask& task,
                        const UnlearnConfig& cfg, const StepObserver& observer = nullptr);
UnlearnRun CfUnlearn(const Model& m_train, const UnlearnTask& task,
                     const UnlearnConfig& cfg, const StepObserver& observer = nullptr);
UnlearnRun AmnesiacUnlearn(const Model& m_train, const UnlearnTask& task,
                           const UnlearnConfig& cfg, const StepObserver& observer = nullptr);
UnlearnRun NegGradUnlearn(const Model& m_train, const UnlearnTask& task,
                          const UnlearnConfig& cfg, const StepObserver& observer = nullptr);
UnlearnRun SsdUnlearn(const Model& m_train, const UnlearnTask& task,
                      const UnlearnConfig& cfg);
UnlearnRun BadTUnlearn(const Model& m_train, const UnlearnTask& task,
                       const UnlearnConfig& cfg, const StepObserver& observer = nullptr);

// Dispatches on cfg.method.
UnlearnRun Unlearn(const Model& m_train, const UnlearnTask& task, const UnlearnConfig& cfg,
                   const StepObserver& observer = nullptr);

// A forget-set pair whose labels were swapped: `promoted` is a pool negative
// that the hinge now pushes above the former positive `demoted`.
struct RevisedPair {
  std::string query_id;
  std::string promoted;
  std::string demoted;

  friend bool operator==(const RevisedPair&, const RevisedPair&) = default;
};

RevisedPair SwapLabels(const RevisedPair& pair);

struct Destinations {
  double d1 = 0.0;  // M_retrain forget-set MRR
  double d2 = 0.0;  // M_retrain test MRR
  double d3 = 0.0;  // d2 / 2
};

Destinations ComputeDestinations(const Model& m_retrain, const UnlearnTask& task);

}  // namespace numur

#endif  // NUMUR_UNLEARN_HPP_
