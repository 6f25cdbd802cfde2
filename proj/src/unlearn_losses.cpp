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

#include "numur/unlearn_losses.hpp"

#include <algorithm>
#include <cmath>

#include "numur/error.hpp"

namespace numur {

namespace {

TokenSpan QueryTokens(const Dataset& d, const Sample& s) {
  return TokenSpan(d.query(s.query_id).tokens);
}

TokenSpan DocTokens(const Dataset& d, const Sample& s) {
  return TokenSpan(d.document(s.doc_id).tokens);
}

double Sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

DeltaValue DeltaFromScores(double teacher_score, double student_score) {
  return {(teacher_score - student_score) / (teacher_score + student_score),
          teacher_score, student_score};
}

DeltaValue Delta(const TeacherSnapshot& teacher, const Model& student,
                 const Dataset& d, const Sample& pair) {
  return DeltaFromScores(teacher.score(d, pair.query_id, pair.doc_id),
                         Forward(student, d, pair.query_id, pair.doc_id));
}

TeacherMinCache TeacherMinCache::Build(const TeacherSnapshot& teacher, const Dataset& d) {
  TeacherMinCache cache;
  for (const Sample& s : d.samples()) {
    const double score = teacher.score(d, s.query_id, s.doc_id);
    auto [it, inserted] = cache.floor_.emplace(s.query_id, score);
    if (!inserted) it->second = std::min(it->second, score);
  }
  return cache;
}

double TeacherMinCache::at(const std::string& query_id) const {
  auto it = floor_.find(query_id);
  if (it == floor_.end()) {
    Fail(ErrorCode::kNotFound, "no teacher floor cached for query '" + query_id + "'");
  }
  return it->second;
}

double DeltaMin(const TeacherMinCache& cache, const Model& student, const Dataset& d,
                const Sample& forget_pair) {
  const double floor = cache.at(forget_pair.query_id);
  const double f = Forward(student, d, forget_pair.query_id, forget_pair.doc_id);
  return (f - floor) / (f + floor);
}

double AbsDeltaLoss(const TeacherSnapshot& teacher, const Model& student,
                    const Dataset& d, const Sample& pair, GradientBuffer<double>* buf) {
  const DeltaValue delta = Delta(teacher, student, d, pair);
  if (buf != nullptr && delta.value != 0.0) {
    const double sum = delta.teacher_score + delta.student_score;
    // ∂Δ/∂f_w = −2 f_M / (f_M + f_w)²
    const double upstream = Sign(delta.value) * (-2.0 * delta.teacher_score / (sum * sum));
    BackwardScore(student, QueryTokens(d, pair), DocTokens(d, pair), upstream, *buf);
  }
  return std::abs(delta.value);
}

double ContrastiveLoss(const TeacherMinCache& cache, const TeacherSnapshot& teacher,
                       const Model& student, const Dataset& d, const Sample& forget_pair,
                       const std::optional<Sample>& partner, GradientBuffer<double>* buf) {
  if (partner && partner->query_id != forget_pair.query_id &&
      partner->doc_id != forget_pair.doc_id) {
    Fail(ErrorCode::kInvalidArgument,
         "partner (" + partner->query_id + ", " + partner->doc_id +
             ") is not entangled with (" + forget_pair.query_id + ", " +
             forget_pair.doc_id + ")");
  }
  const double floor = cache.at(forget_pair.query_id);
  const double f = Forward(student, d, forget_pair.query_id, forget_pair.doc_id);
  const double dmin = (f - floor) / (f + floor);
  double loss = 0.0;
  if (dmin > 0.0) {
    loss += dmin;
    if (buf != nullptr) {
      // ∂Δ^min/∂f_w = 2 s^min / (f_w + s^min)²
      const double sum = f + floor;
      BackwardScore(student, QueryTokens(d, forget_pair), DocTokens(d, forget_pair),
                    2.0 * floor / (sum * sum), *buf);
    }
  }
  if (partner) loss += AbsDeltaLoss(teacher, student, d, *partner, buf);
  return loss;
}

double ConsistentLoss(const TeacherSnapshot& teacher, const Model& student,
                      const Dataset& d, const Sample& pos_pair, const Sample& neg_pair,
                      GradientBuffer<double>* buf) {
  if (!pos_pair.positive() || neg_pair.positive()) {
    Fail(ErrorCode::kInvalidArgument,
         "consistent loss needs a positive and a negative sample");
  }
  return AbsDeltaLoss(teacher, student, d, pos_pair, buf) +
         AbsDeltaLoss(teacher, student, d, neg_pair, buf);
}

}  // namespace numur
