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

#ifndef NUMUR_PARTITION_HPP_
#define NUMUR_PARTITION_HPP_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "numur/corpus.hpp"

namespace numur {

enum class RemovalKind { kQuery, kDocument };

const char* RemovalKindName(RemovalKind kind);

// A removal request: Q' for query removal, D' for document removal.
struct ForgetSpec {
  RemovalKind kind = RemovalKind::kQuery;
  std::set<std::string> ids;

  // Throws unless ids is non-empty and every id resolves in `d`.
  void Validate(const Dataset& d) const;
  bool contains(const std::string& id) const { return ids.count(id) > 0; }
};

ForgetSpec LoadForgetSpec(const std::filesystem::path& path);
void SaveForgetSpec(const ForgetSpec& spec, const std::filesystem::path& path);

// The (F, E, D) split of a training set. Each list keeps dataset order.
struct Partition {
  RemovalKind kind = RemovalKind::kQuery;
  std::vector<Sample> forget;
  std::vector<Sample> entangled;
  std::vector<Sample> disjoint;
  // Q_F: distinct queries of the forget set.
  std::set<std::string> forget_queries;
  std::set<std::string> forget_docs;

  // R = E ∪ D, entangled samples first.
  std::vector<Sample> retained() const;
  std::size_t size() const {
    return forget.size() + entangled.size() + disjoint.size();
  }
};

/// Splits `d` for the removal request `spec`.
///
/// F holds the samples of the removed queries (or documents). E holds every
/// retained sample that shares a query id or a document id with some sample
/// of F, and D holds the rest. A request that would forget every sample is
/// rejected.
Partition MakePartition(const Dataset& d, const ForgetSpec& spec);

// E_x: the entangled samples sharing a query or document with `x` (x ∈ F).
std::vector<Sample> EntangledPartners(const Partition& p, const Sample& x);

// Draws a removal request covering roughly `fraction` of the positive pairs.
ForgetSpec SampleForgetSpec(const Dataset& d, RemovalKind kind, double fraction,
                            std::uint64_t seed);

// One row per sample: set, query_id, doc_id, label.
void SavePartition(const Partition& p, const std::filesystem::path& path);

}  // namespace numur

#endif  // NUMUR_PARTITION_HPP_
