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

#ifndef NUMUR_UNLEARN_LOSSES_HPP_
#define NUMUR_UNLEARN_LOSSES_HPP_

#include <map>
#include <optional>
#include <string>

#include "numur/corpus.hpp"
#include "numur/score_model.hpp"

namespace numur {

// Δ = (f_teacher − f_student) / (f_teacher + f_student), in (−1, 1).
struct DeltaValue {
  double value = 0.0;
  double teacher_score = 0.0;
  double student_score = 0.0;
};

DeltaValue DeltaFromScores(double teacher_score, double student_score);

DeltaValue Delta(const TeacherSnapshot& teacher, const Model& student,
                 const Dataset& d, const Sample& pair);

/// Per-query floor s^min(q): the lowest teacher score over every sample of the
/// query in the full training set S (forget samples included).
class TeacherMinCache {
 public:
  static TeacherMinCache Build(const TeacherSnapshot& teacher, const Dataset& d);

  // Throws kNotFound for a query with no samples.
  double at(const std::string& query_id) const;
  bool contains(const std::string& query_id) const { return floor_.count(query_id) > 0; }
  std::size_t size() const { return floor_.size(); }

  friend bool operator==(const TeacherMinCache&, const TeacherMinCache&) = default;

 private:
  std::map<std::string, double> floor_;
};

// Δ^min = (f_w − s^min) / (f_w + s^min): positive while the student still
// scores the pair above the teacher's per-query floor.
double DeltaMin(const TeacherMinCache& cache, const Model& student, const Dataset& d,
                const Sample& forget_pair);

// |Δ_{w,teacher}(x)|, with its gradient accumulated into `buf` when non-null.
// The subgradient at Δ = 0 is taken as 0.
double AbsDeltaLoss(const TeacherSnapshot& teacher, const Model& student,
                    const Dataset& d, const Sample& pair, GradientBuffer<double>* buf);

/// Contrastive loss for one forget sample:
///
///   ReLU(Δ^min(x)) + |Δ(x')|
///
/// where x' is an entangled partner of x sharing its query or document. With
/// no partner the second term is zero. Gradients with respect to the student
/// are accumulated into `buf` when non-null; subgradients at kinks are 0.
double ContrastiveLoss(const TeacherMinCache& cache, const TeacherSnapshot& teacher,
                       const Model& student, const Dataset& d, const Sample& forget_pair,
                       const std::optional<Sample>& partner, GradientBuffer<double>* buf);

/// Consistent loss for a positive and a negative disjoint sample:
/// |Δ(x⁺)| + |Δ(x⁻)|.
double ConsistentLoss(const TeacherSnapshot& teacher, const Model& student,
                      const Dataset& d, const Sample& pos_pair, const Sample& neg_pair,
                      GradientBuffer<double>* buf);

}  // namespace numur

#endif  // NUMUR_UNLEARN_LOSSES_HPP_
