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

#ifndef NUMUR_CORPUS_HPP_
#define NUMUR_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace numur {

using TokenId = std::int32_t;

struct Query {
  std::string id;
  std::vector<TokenId> tokens;
};

struct Document {
  std::string id;
  std::vector<TokenId> tokens;
};

enum class Label : std::uint8_t { kNegative = 0, kPositive = 1 };

struct Sample {
  std::string query_id;
  std::string doc_id;
  Label label = Label::kNegative;

  bool positive() const { return label == Label::kPositive; }
  friend bool operator==(const Sample&, const Sample&) = default;
};

/// A labelled IR training or test collection.
///
/// Immutable once built: construct through `Dataset::Create`, which checks
/// every invariant (token range, id resolution, unique pairs, pool coverage)
/// and throws `numur::Error` on the first violation.
class Dataset {
 public:
  Dataset() = default;

  static Dataset Create(int vocab_size, std::vector<Query> queries,
                        std::vector<Document> documents,
                        std::vector<Sample> samples,
                        std::map<std::string, std::vector<std::string>> pools);

  int vocab_size() const { return vocab_size_; }
  const std::vector<Query>& queries() const { return queries_; }
  const std::vector<Document>& documents() const { return documents_; }
  const std::vector<Sample>& samples() const { return samples_; }
  const std::map<std::string, std::vector<std::string>>& pools() const {
    return pools_;
  }

  bool has_query(const std::string& id) const;
  bool has_document(const std::string& id) const;
  const Query& query(const std::string& id) const;
  const Document& document(const std::string& id) const;
  // Throws kNotFound for a query without a pool.
  const std::vector<std::string>& pool(const std::string& query_id) const;

  // Indices into samples() for one query, in dataset order.
  const std::vector<std::size_t>& samples_of_query(
      const std::string& query_id) const;
  std::optional<std::size_t> find_sample(const std::string& query_id,
                                         const std::string& doc_id) const;
  bool is_positive(const std::string& query_id,
                   const std::string& doc_id) const;

  // Distinct query ids of samples(), in first-appearance order.
  std::vector<std::string> sample_query_ids() const;

  bool empty() const { return samples_.empty(); }

 private:
  void Index();

  int vocab_size_ = 1;
  std::vector<Query> queries_;
  std::vector<Document> documents_;
  std::vector<Sample> samples_;
  std::map<std::string, std::vector<std::string>> pools_;

  std::map<std::string, std::size_t> query_index_;
  std::map<std::string, std::size_t> doc_index_;
  std::map<std::pair<std::string, std::string>, std::size_t> pair_index_;
  std::map<std::string, std::vector<std::size_t>> by_query_;
};

struct CorpusSplit {
  Dataset train;
  Dataset test;
};

struct DatasetPaths {
  std::filesystem::path queries;
  std::filesystem::path docs;
  std::filesystem::path qrels;
  std::filesystem::path pools;

  // queries.jsonl, docs.jsonl, qrels.tsv, pools.tsv inside `dir`.
  static DatasetPaths InDirectory(const std::filesystem::path& dir);
};

// When `vocab_size` is absent it is inferred as max token + 1.
Dataset LoadDataset(const DatasetPaths& paths,
                    std::optional<int> vocab_size = std::nullopt);
void SaveDataset(const Dataset& d, const DatasetPaths& paths);

// Directory form: the four files plus meta.json carrying vocab_size.
Dataset LoadDatasetDir(const std::filesystem::path& dir);
void SaveDatasetDir(const Dataset& d, const std::filesystem::path& dir);

struct SyntheticConfig {
  int n_queries = 64;
  int n_docs = 256;
  int vocab_size = 512;
  int positives_per_query = 2;
  int pool_size = 100;
  double entanglement_rate = 0.5;
  double test_fraction = 0.2;
  std::uint64_t seed = 7;

  // Labelled negative samples per query, drawn from the pool.
  int negatives_per_query = 4;
  // Planted block shared by a query and each of its positives.
  int block_tokens = 4;
  int query_noise_tokens = 1;
  int doc_noise_tokens = 4;
  // Tokens [0, signal_vocab) form the block alphabet; 0 means vocab_size / 4.
  int signal_vocab = 0;
  // High-frequency tokens [signal_vocab, signal_vocab + common_vocab) that
  // every query and document draws from, like stopwords in real text.
  int common_vocab = 0;
  int query_common_tokens = 0;
  int doc_common_tokens = 0;
};

CorpusSplit GenerateSynthetic(const SyntheticConfig& config);

struct StatsRecord {
  std::size_t queries = 0;
  std::size_t queries_with_multiple_positives = 0;
  double mean_positives_per_query = 0.0;
  double mean_pool_size = 0.0;
  std::size_t pairwise_samples = 0;
  // Positive documents relevant to two or more queries.
  std::size_t shared_positive_docs = 0;
};

StatsRecord DatasetStats(const Dataset& d);

}  // namespace numur

#endif  // NUMUR_CORPUS_HPP_
