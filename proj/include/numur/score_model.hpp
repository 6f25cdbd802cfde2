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

#ifndef NUMUR_SCORE_MODEL_HPP_
#define NUMUR_SCORE_MODEL_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "numur/corpus.hpp"
#include "numur/error.hpp"

namespace numur {

template <typename Scalar>
using EmbeddingMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using TokenSpan = std::span<const TokenId>;

template <typename Scalar>
Scalar Softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

template <typename Scalar>
Scalar Sigmoid(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

/// Dual-embedding relevance scorer.
///
/// score(q, d) = softplus(mean_q(embed_q) · mean_d(embed_d)), where the means
/// run over the token rows of the query and the document. The softplus keeps
/// every score strictly positive.
template <typename Scalar>
class ScoreModel {
 public:
  using Matrix = EmbeddingMatrix<Scalar>;

  ScoreModel() = default;
  ScoreModel(int vocab_size, int dim)
      : embed_q_(Matrix::Zero(vocab_size, dim)),
        embed_d_(Matrix::Zero(vocab_size, dim)) {}

  // Uniform in [-scale, scale]; both tables drawn from one seeded stream.
  static ScoreModel Random(int vocab_size, int dim, std::uint64_t seed,
                           double scale = 0.1) {
    ScoreModel m(vocab_size, dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (Eigen::Index i = 0; i < m.embed_q_.size(); ++i) {
      m.embed_q_.data()[i] = static_cast<Scalar>(u(rng));
    }
    for (Eigen::Index i = 0; i < m.embed_d_.size(); ++i) {
      m.embed_d_.data()[i] = static_cast<Scalar>(u(rng));
    }
    return m;
  }

  int vocab_size() const { return static_cast<int>(embed_q_.rows()); }
  int dim() const { return static_cast<int>(embed_q_.cols()); }

  Matrix& embed_q() { return embed_q_; }
  Matrix& embed_d() { return embed_d_; }
  const Matrix& embed_q() const { return embed_q_; }
  const Matrix& embed_d() const { return embed_d_; }

  bool all_finite() const {
    return embed_q_.allFinite() && embed_d_.allFinite();
  }

  template <typename Other>
  ScoreModel<Other> cast() const {
    ScoreModel<Other> out(vocab_size(), dim());
    out.embed_q() = embed_q_.template cast<Other>();
    out.embed_d() = embed_d_.template cast<Other>();
    return out;
  }

  friend bool operator==(const ScoreModel& a, const ScoreModel& b) {
    return a.embed_q_.rows() == b.embed_q_.rows() &&
           a.embed_q_.cols() == b.embed_q_.cols() &&
           a.embed_q_ == b.embed_q_ && a.embed_d_ == b.embed_d_;
  }

 private:
  Matrix embed_q_;
  Matrix embed_d_;
};

using Model = ScoreModel<double>;

template <typename Scalar>
DenseVector<Scalar> MeanPool(const EmbeddingMatrix<Scalar>& table,
                             TokenSpan tokens) {
  DenseVector<Scalar> acc = DenseVector<Scalar>::Zero(table.cols());
  for (TokenId t : tokens) acc += table.row(t).transpose();
  return acc / static_cast<Scalar>(tokens.size());
}

template <typename Scalar>
Scalar Logit(const ScoreModel<Scalar>& m, TokenSpan query, TokenSpan doc) {
  return MeanPool(m.embed_q(), query).dot(MeanPool(m.embed_d(), doc));
}

template <typename Scalar>
Scalar Forward(const ScoreModel<Scalar>& m, TokenSpan query, TokenSpan doc) {
  return Softplus(Logit(m, query, doc));
}

inline double Forward(const Model& m, const Dataset& d,
                      const std::string& query_id, const std::string& doc_id) {
  return Forward(m, TokenSpan(d.query(query_id).tokens),
                 TokenSpan(d.document(doc_id).tokens));
}

/// Gradient accumulator shaped like a ScoreModel.
///
/// Tracks which rows were written so that clearing and applying an update
/// costs O(touched rows) instead of O(vocab).
template <typename Scalar>
class GradientBuffer {
 public:
  using Matrix = EmbeddingMatrix<Scalar>;

  GradientBuffer() = default;
  explicit GradientBuffer(const ScoreModel<Scalar>& shape)
      : grad_q_(Matrix::Zero(shape.vocab_size(), shape.dim())),
        grad_d_(Matrix::Zero(shape.vocab_size(), shape.dim())) {}

  bool congruent(const ScoreModel<Scalar>& m) const {
    return grad_q_.rows() == m.embed_q().rows() &&
           grad_q_.cols() == m.embed_q().cols();
  }

  const Matrix& grad_q() const { return grad_q_; }
  const Matrix& grad_d() const { return grad_d_; }

  template <typename Row>
  void add_q(TokenId t, const Row& row) {
    grad_q_.row(t) += row;
    touch(touched_q_, t);
  }
  template <typename Row>
  void add_d(TokenId t, const Row& row) {
    grad_d_.row(t) += row;
    touch(touched_d_, t);
  }

  const std::vector<TokenId>& touched_q() const { return touched_q_; }
  const std::vector<TokenId>& touched_d() const { return touched_d_; }

  void clear() {
    for (TokenId t : touched_q_) grad_q_.row(t).setZero();
    for (TokenId t : touched_d_) grad_d_.row(t).setZero();
    touched_q_.clear();
    touched_d_.clear();
  }

  bool is_zero() const { return grad_q_.isZero(0) && grad_d_.isZero(0); }

 private:
  static void touch(std::vector<TokenId>& rows, TokenId t) {
    auto it = std::lower_bound(rows.begin(), rows.end(), t);
    if (it == rows.end() || *it != t) rows.insert(it, t);
  }

  Matrix grad_q_;
  Matrix grad_d_;
  std::vector<TokenId> touched_q_;
  std::vector<TokenId> touched_d_;
};

// Accumulates upstream · ∂score/∂θ into `buf`.
template <typename Scalar>
void BackwardScore(const ScoreModel<Scalar>& m, TokenSpan query, TokenSpan doc,
                   Scalar upstream, GradientBuffer<Scalar>& buf) {
  if (upstream == Scalar(0)) return;
  const DenseVector<Scalar> pq = MeanPool(m.embed_q(), query);
  const DenseVector<Scalar> pd = MeanPool(m.embed_d(), doc);
  const Scalar g = upstream * Sigmoid(pq.dot(pd));
  const DenseVector<Scalar> row_q = pd * (g / static_cast<Scalar>(query.size()));
  const DenseVector<Scalar> row_d = pq * (g / static_cast<Scalar>(doc.size()));
  for (TokenId t : query) buf.add_q(t, row_q.transpose());
  for (TokenId t : doc) buf.add_d(t, row_d.transpose());
}

inline void BackwardScore(const Model& m, const Dataset& d,
                          const std::string& query_id, const std::string& doc_id,
                          double upstream, GradientBuffer<double>& buf) {
  if (!buf.congruent(m)) {
    Fail(ErrorCode::kInvalidArgument, "gradient buffer shape does not match model");
  }
  BackwardScore(m, TokenSpan(d.query(query_id).tokens),
                TokenSpan(d.document(doc_id).tokens), upstream, buf);
}

// θ ← θ − lr · g over the touched rows. A negative rate ascends.
template <typename Scalar>
void ApplySgd(ScoreModel<Scalar>& m, const GradientBuffer<Scalar>& buf, Scalar lr) {
  for (TokenId t : buf.touched_q()) m.embed_q().row(t) -= lr * buf.grad_q().row(t);
  for (TokenId t : buf.touched_d()) m.embed_d().row(t) -= lr * buf.grad_d().row(t);
}

/// Frozen copy of a model, used as a fixed teacher.
class TeacherSnapshot {
 public:
  explicit TeacherSnapshot(const Model& m) : model_(m) {}

  const Model& model() const { return model_; }
  double score(const Dataset& d, const std::string& query_id,
               const std::string& doc_id) const {
    return Forward(model_, d, query_id, doc_id);
  }

 private:
  Model model_;
};

inline TeacherSnapshot Snapshot(const Model& m) { return TeacherSnapshot(m); }

// model.bin: "NUMR", u32 version, u32 vocab, u32 dim, then embed_q and embed_d
// as row-major little-endian float64.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void SaveModel(const Model& m, const std::filesystem::path& path);
Model LoadModel(const std::filesystem::path& path);

}  // namespace numur

#endif  // NUMUR_SCORE_MODEL_HPP_
