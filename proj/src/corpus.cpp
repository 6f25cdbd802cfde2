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

#include "numur/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "numur/error.hpp"

namespace numur {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

void CheckTokens(const std::string& kind, const std::string& id,
                 const std::vector<TokenId>& tokens, int vocab_size) {
  if (tokens.empty()) {
    Fail(ErrorCode::kInvariant, kind + " '" + id + "' has no tokens");
  }
  for (TokenId t : tokens) {
    if (t < 0 || t >= vocab_size) {
      Fail(ErrorCode::kInvariant, kind + " '" + id + "' token " +
                                      std::to_string(t) + " outside vocab " +
                                      std::to_string(vocab_size));
    }
  }
}

}  // namespace

Dataset Dataset::Create(int vocab_size, std::vector<Query> queries,
                        std::vector<Document> documents,
                        std::vector<Sample> samples,
                        std::map<std::string, std::vector<std::string>> pools) {
  if (vocab_size <= 0) {
    Fail(ErrorCode::kInvariant, "vocab_size must be positive");
  }
  Dataset d;
  d.vocab_size_ = vocab_size;
  d.queries_ = std::move(queries);
  d.documents_ = std::move(documents);
  d.samples_ = std::move(samples);
  d.pools_ = std::move(pools);

  for (std::size_t i = 0; i < d.queries_.size(); ++i) {
    const Query& q = d.queries_[i];
    CheckTokens("query", q.id, q.tokens, vocab_size);
    if (!d.query_index_.emplace(q.id, i).second) {
      Fail(ErrorCode::kDuplicate, "duplicate query id '" + q.id + "'");
    }
  }
  for (std::size_t i = 0; i < d.documents_.size(); ++i) {
    const Document& doc = d.documents_[i];
    CheckTokens("document", doc.id, doc.tokens, vocab_size);
    if (!d.doc_index_.emplace(doc.id, i).second) {
      Fail(ErrorCode::kDuplicate, "duplicate document id '" + doc.id + "'");
    }
  }
  for (const auto& [qid, pool] : d.pools_) {
    if (!d.query_index_.count(qid)) {
      Fail(ErrorCode::kDanglingRef, "pool references unknown query '" + qid + "'");
    }
    std::set<std::string> seen;
    for (const std::string& did : pool) {
      if (!d.doc_index_.count(did)) {
        Fail(ErrorCode::kDanglingRef,
             "pool of '" + qid + "' references unknown document '" + did + "'");
      }
      if (!seen.insert(did).second) {
        Fail(ErrorCode::kDuplicate,
             "document '" + did + "' repeated in pool of '" + qid + "'");
      }
    }
  }
  for (std::size_t i = 0; i < d.samples_.size(); ++i) {
    const Sample& s = d.samples_[i];
    if (!d.query_index_.count(s.query_id)) {
      Fail(ErrorCode::kDanglingRef, "sample references unknown query '" + s.query_id + "'");
    }
    if (!d.doc_index_.count(s.doc_id)) {
      Fail(ErrorCode::kDanglingRef, "sample references unknown document '" + s.doc_id + "'");
    }
    if (!d.pair_index_.emplace(std::make_pair(s.query_id, s.doc_id), i).second) {
      Fail(ErrorCode::kDuplicate,
           "duplicate sample (" + s.query_id + ", " + s.doc_id + ")");
    }
    // Labelled negatives may sit outside the pool; positives may not.
    auto pool = d.pools_.find(s.query_id);
    if (pool == d.pools_.end()) {
      Fail(ErrorCode::kInvariant, "query '" + s.query_id + "' has samples but no pool");
    }
    if (s.positive() && std::find(pool->second.begin(), pool->second.end(), s.doc_id) ==
                            pool->second.end()) {
      Fail(ErrorCode::kInvariant,
           "positive sample (" + s.query_id + ", " + s.doc_id + ") absent from pool");
    }
    d.by_query_[s.query_id].push_back(i);
  }
  return d;
}

bool Dataset::has_query(const std::string& id) const {
  return query_index_.count(id) > 0;
}

bool Dataset::has_document(const std::string& id) const {
  return doc_index_.count(id) > 0;
}

const Query& Dataset::query(const std::string& id) const {
  auto it = query_index_.find(id);
  if (it == query_index_.end()) {
    Fail(ErrorCode::kNotFound, "unknown query '" + id + "'");
  }
  return queries_[it->second];
}

const Document& Dataset::document(const std::string& id) const {
  auto it = doc_index_.find(id);
  if (it == doc_index_.end()) {
    Fail(ErrorCode::kNotFound, "unknown document '" + id + "'");
  }
  return documents_[it->second];
}

const std::vector<std::string>& Dataset::pool(const std::string& query_id) const {
  auto it = pools_.find(query_id);
  if (it == pools_.end()) {
    Fail(ErrorCode::kNotFound, "no pool for query '" + query_id + "'");
  }
  return it->second;
}

const std::vector<std::size_t>& Dataset::samples_of_query(
    const std::string& query_id) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_query_.find(query_id);
  return it == by_query_.end() ? kNone : it->second;
}

std::optional<std::size_t> Dataset::find_sample(const std::string& query_id,
                                                const std::string& doc_id) const {
  auto it = pair_index_.find({query_id, doc_id});
  if (it == pair_index_.end()) return std::nullopt;
  return it->second;
}

bool Dataset::is_positive(const std::string& query_id,
                          const std::string& doc_id) const {
  auto idx = find_sample(query_id, doc_id);
  return idx && samples_[*idx].positive();
}

std::vector<std::string> Dataset::sample_query_ids() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const Sample& s : samples_) {
    if (seen.insert(s.query_id).second) out.push_back(s.query_id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// File formats

DatasetPaths DatasetPaths::InDirectory(const fs::path& dir) {
  return {dir / "queries.jsonl", dir / "docs.jsonl", dir / "qrels.tsv",
          dir / "pools.tsv"};
}

namespace {

std::ifstream OpenIn(const fs::path& p) {
  std::ifstream in(p);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + p.string() + "'");
  return in;
}

std::ofstream OpenOut(const fs::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + p.string() + "'");
  return out;
}

std::string Where(const fs::path& p, std::size_t line) {
  return p.filename().string() + ":" + std::to_string(line);
}

std::string StripCr(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                           line.back() == '\t')) {
    line.pop_back();
  }
  return line;
}

template <typename Item>
std::vector<Item> ReadTokenized(const fs::path& p) {
  std::ifstream in = OpenIn(p);
  std::vector<Item> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(line);
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      Item item;
      item.id = j.at("id").get<std::string>();
      item.tokens = j.at("tokens").get<std::vector<TokenId>>();
      items.push_back(std::move(item));
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, "malformed line " + Where(p, lineno) + ": " + e.what());
    }
  }
  return items;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) fields.push_back(f);
  return fields;
}

bool ParseInt(const std::string& s, long long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

template <typename Fn>
void ReadTsv(const fs::path& p, const std::vector<std::string>& header, Fn&& fn) {
  std::ifstream in = OpenIn(p);
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = StripCr(line);
    if (line.empty()) continue;
    auto fields = SplitTabs(line);
    if (!saw_header) {
      saw_header = true;
      if (fields == header) continue;
    }
    if (fields.size() != header.size()) {
      Fail(ErrorCode::kParse, "malformed line " + Where(p, lineno) + ": expected " +
                                  std::to_string(header.size()) + " tab-separated fields");
    }
    fn(fields, lineno);
  }
}

}  // namespace

Dataset LoadDataset(const DatasetPaths& paths, std::optional<int> vocab_size) {
  auto queries = ReadTokenized<Query>(paths.queries);
  auto docs = ReadTokenized<Document>(paths.docs);

  std::vector<Sample> samples;
  ReadTsv(paths.qrels, {"query_id", "doc_id", "label"},
          [&](const std::vector<std::string>& f, std::size_t lineno) {
            long long label = 0;
            if (!ParseInt(f[2], label) || (label != 0 && label != 1)) {
              Fail(ErrorCode::kParse, "malformed line " + Where(paths.qrels, lineno) +
                                          ": label must be 0 or 1");
            }
            samples.push_back({f[0], f[1], label ? Label::kPositive : Label::kNegative});
          });

  // Pool order is defined by rank_hint; equal hints keep file order.
  std::map<std::string, std::vector<std::pair<long long, std::string>>> hinted;
  ReadTsv(paths.pools, {"query_id", "doc_id", "rank_hint"},
          [&](const std::vector<std::string>& f, std::size_t lineno) {
            long long hint = 0;
            if (!ParseInt(f[2], hint)) {
              Fail(ErrorCode::kParse, "malformed line " + Where(paths.pools, lineno) +
                                          ": rank_hint must be an integer");
            }
            hinted[f[0]].emplace_back(hint, f[1]);
          });
  std::map<std::string, std::vector<std::string>> pools;
  for (auto& [qid, entries] : hinted) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    auto& pool = pools[qid];
    for (auto& e : entries) pool.push_back(std::move(e.second));
  }

  int vocab = 1;
  if (vocab_size) {
    vocab = *vocab_size;
  } else {
    for (const auto& q : queries)
      for (TokenId t : q.tokens) vocab = std::max(vocab, t + 1);
    for (const auto& doc : docs)
      for (TokenId t : doc.tokens) vocab = std::max(vocab, t + 1);
  }
  return Dataset::Create(vocab, std::move(queries), std::move(docs),
                         std::move(samples), std::move(pools));
}

namespace {

template <typename Item>
void WriteTokenized(const fs::path& p, const std::vector<Item>& items) {
  std::ofstream out = OpenOut(p);
  for (const Item& item : items) {
    json j;
    j["id"] = item.id;
    j["tokens"] = item.tokens;
    out << j.dump() << '\n';
  }
}

}  // namespace

void SaveDataset(const Dataset& d, const DatasetPaths& paths) {
  WriteTokenized(paths.queries, d.queries());
  WriteTokenized(paths.docs, d.documents());
  {
    std::ofstream out = OpenOut(paths.qrels);
    out << "query_id\tdoc_id\tlabel\n";
    for (const Sample& s : d.samples()) {
      out << s.query_id << '\t' << s.doc_id << '\t' << (s.positive() ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream out = OpenOut(paths.pools);
    out << "query_id\tdoc_id\trank_hint\n";
    // Pools follow query order so the file reads naturally next to qrels.
    for (const Query& q : d.queries()) {
      auto it = d.pools().find(q.id);
      if (it == d.pools().end()) continue;
      for (std::size_t r = 0; r < it->second.size(); ++r) {
        out << q.id << '\t' << it->second[r] << '\t' << r + 1 << '\n';
      }
    }
  }
}

Dataset LoadDatasetDir(const fs::path& dir) {
  std::optional<int> vocab;
  const fs::path meta = dir / "meta.json";
  if (fs::exists(meta)) {
    std::ifstream in = OpenIn(meta);
    try {
      vocab = json::parse(in).at("vocab_size").get<int>();
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, "malformed '" + meta.string() + "': " + e.what());
    }
  }
  return LoadDataset(DatasetPaths::InDirectory(dir), vocab);
}

void SaveDatasetDir(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  SaveDataset(d, DatasetPaths::InDirectory(dir));
  std::ofstream out = OpenOut(dir / "meta.json");
  out << json{{"vocab_size", d.vocab_size()}}.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic generation

namespace {

std::string PaddedId(char prefix, int index, int count) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(count - 1).size()));
  std::string digits = std::to_string(index);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

std::vector<TokenId> SampleDistinct(std::mt19937_64& rng, TokenId lo, TokenId hi,
                                    int count) {
  std::vector<TokenId> all(hi - lo);
  for (TokenId t = lo; t < hi; ++t) all[t - lo] = t;
  // Partial Fisher-Yates keeps the draw independent of std::shuffle.
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, all.size() - 1);
    std::swap(all[i], all[pick(rng)]);
  }
  all.resize(count);
  return all;
}

// Assigns `per_query` positive slots for every query in `members`, creating
// shared documents for an `rate` fraction of the distinct positives.
std::vector<std::vector<int>> AllocatePositives(std::mt19937_64& rng,
                                                const std::vector<int>& members,
                                                int per_query, double rate) {
  const int k = static_cast<int>(members.size());
  const int slots = k * per_query;
  int shared = static_cast<int>(std::lround(rate * slots / (1.0 + rate)));
  if (k < 2) shared = 0;
  std::vector<std::vector<int>> docs;  // each entry: local query indices
  std::vector<int> capacity(k, per_query);
  std::vector<int> order(k);
  for (int s = 0; s < shared; ++s) {
    for (int i = 0; i < k; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return capacity[a] > capacity[b]; });
    if (capacity[order[1]] == 0) break;
    --capacity[order[0]];
    --capacity[order[1]];
    docs.push_back({std::min(order[0], order[1]), std::max(order[0], order[1])});
  }
  for (int q = 0; q < k; ++q) {
    for (int c = 0; c < capacity[q]; ++c) docs.push_back({q});
  }
  for (auto& owners : docs) {
    for (int& o : owners) o = members[o];
  }
  return docs;
}

}  // namespace

CorpusSplit GenerateSynthetic(const SyntheticConfig& c) {
  auto infeasible = [](const std::string& why) { Fail(ErrorCode::kInfeasible, why); };
  if (c.n_queries < 1 || c.n_docs < 1 || c.vocab_size < 2) {
    infeasible("n_queries, n_docs and vocab_size must be positive");
  }
  if (c.positives_per_query < 1) infeasible("positives_per_query must be >= 1");
  if (c.pool_size < c.positives_per_query) {
    infeasible("pool_size must be >= positives_per_query");
  }
  if (c.n_docs < c.pool_size) infeasible("n_docs too small for pool_size");
  if (!(c.entanglement_rate >= 0.0 && c.entanglement_rate <= 1.0)) {
    infeasible("entanglement_rate must lie in [0, 1]");
  }
  if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0)) {
    infeasible("test_fraction must lie in [0, 1)");
  }
  if (c.negatives_per_query < 0 ||
      c.negatives_per_query > c.pool_size - c.positives_per_query) {
    infeasible("negatives_per_query exceeds the negatives available in a pool");
  }
  const int signal = c.signal_vocab > 0 ? c.signal_vocab : c.vocab_size / 4;
  if (c.block_tokens < 1 || c.block_tokens > signal || signal >= c.vocab_size) {
    infeasible("block_tokens does not fit the signal vocabulary");
  }
  if (c.common_vocab < 0 || c.query_common_tokens < 0 || c.doc_common_tokens < 0 ||
      c.query_common_tokens > c.common_vocab || c.doc_common_tokens > c.common_vocab ||
      signal + c.common_vocab >= c.vocab_size) {
    infeasible("common token counts do not fit the common vocabulary");
  }
  const int noise_lo = signal + c.common_vocab;
  const int noise = c.vocab_size - noise_lo;
  if (c.query_noise_tokens < 0 || c.doc_noise_tokens < 0 ||
      c.query_noise_tokens > noise || c.doc_noise_tokens > noise) {
    infeasible("noise token counts exceed the noise vocabulary");
  }

  std::mt19937_64 rng(c.seed);
  const int n_test = static_cast<int>(std::lround(c.n_queries * c.test_fraction));
  const int n_train = c.n_queries - n_test;
  if (n_train < 1) infeasible("test_fraction leaves no training queries");

  std::vector<int> query_order(c.n_queries);
  for (int i = 0; i < c.n_queries; ++i) query_order[i] = i;
  std::shuffle(query_order.begin(), query_order.end(), rng);
  std::vector<int> test_members(query_order.begin(), query_order.begin() + n_test);
  std::vector<int> train_members(query_order.begin() + n_test, query_order.end());
  std::sort(test_members.begin(), test_members.end());
  std::sort(train_members.begin(), train_members.end());

  std::vector<std::vector<TokenId>> blocks(c.n_queries);
  std::vector<Query> queries(c.n_queries);
  for (int q = 0; q < c.n_queries; ++q) {
    blocks[q] = SampleDistinct(rng, 0, signal, c.block_tokens);
    queries[q].id = PaddedId('q', q, c.n_queries);
    queries[q].tokens = blocks[q];
    auto common = SampleDistinct(rng, signal, noise_lo, c.query_common_tokens);
    auto extra = SampleDistinct(rng, noise_lo, c.vocab_size, c.query_noise_tokens);
    queries[q].tokens.insert(queries[q].tokens.end(), common.begin(), common.end());
    queries[q].tokens.insert(queries[q].tokens.end(), extra.begin(), extra.end());
  }

  auto positive_docs = AllocatePositives(rng, train_members, c.positives_per_query,
                                         c.entanglement_rate);
  auto test_docs = AllocatePositives(rng, test_members, c.positives_per_query,
                                     c.entanglement_rate);
  positive_docs.insert(positive_docs.end(), test_docs.begin(), test_docs.end());
  if (static_cast<int>(positive_docs.size()) > c.n_docs) {
    infeasible("n_docs too small for the positive documents required");
  }

  // Doc ids are shuffled so that id order carries no relevance signal.
  std::vector<int> doc_slots(c.n_docs);
  for (int i = 0; i < c.n_docs; ++i) doc_slots[i] = i;
  std::shuffle(doc_slots.begin(), doc_slots.end(), rng);

  std::vector<Document> documents(c.n_docs);
  std::vector<std::vector<int>> positives_of(c.n_queries);
  std::vector<bool> is_positive_doc(c.n_docs, false);
  for (int i = 0; i < c.n_docs; ++i) {
    const int slot = doc_slots[i];
    Document& doc = documents[slot];
    doc.id = PaddedId('d', slot, c.n_docs);
    if (i < static_cast<int>(positive_docs.size())) {
      is_positive_doc[slot] = true;
      for (int q : positive_docs[i]) {
        positives_of[q].push_back(slot);
        for (TokenId t : blocks[q]) {
          if (std::find(doc.tokens.begin(), doc.tokens.end(), t) == doc.tokens.end()) {
            doc.tokens.push_back(t);
          }
        }
      }
    } else {
      doc.tokens = SampleDistinct(rng, 0, signal, c.block_tokens);
    }
    auto common = SampleDistinct(rng, signal, noise_lo, c.doc_common_tokens);
    auto extra = SampleDistinct(rng, noise_lo, c.vocab_size, c.doc_noise_tokens);
    doc.tokens.insert(doc.tokens.end(), common.begin(), common.end());
    doc.tokens.insert(doc.tokens.end(), extra.begin(), extra.end());
  }

  auto build = [&](const std::vector<int>& members) {
    std::vector<Query> qs;
    std::vector<Sample> samples;
    std::map<std::string, std::vector<std::string>> pools;
    for (int q : members) {
      qs.push_back(queries[q]);
      auto& mine = positives_of[q];
      std::sort(mine.begin(), mine.end());
      std::vector<int> candidates;
      for (int dslot = 0; dslot < c.n_docs; ++dslot) {
        if (std::find(mine.begin(), mine.end(), dslot) == mine.end()) {
          candidates.push_back(dslot);
        }
      }
      std::shuffle(candidates.begin(), candidates.end(), rng);
      candidates.resize(c.pool_size - mine.size());

      std::vector<int> pool(mine.begin(), mine.end());
      pool.insert(pool.end(), candidates.begin(), candidates.end());
      std::shuffle(pool.begin(), pool.end(), rng);
      auto& ids = pools[queries[q].id];
      for (int dslot : pool) ids.push_back(documents[dslot].id);

      for (int dslot : mine) {
        samples.push_back({queries[q].id, documents[dslot].id, Label::kPositive});
      }
      // Labelled negatives prefer documents that are relevant to no query.
      std::stable_partition(candidates.begin(), candidates.end(),
                            [&](int dslot) { return !is_positive_doc[dslot]; });
      for (int i = 0; i < c.negatives_per_query; ++i) {
        samples.push_back({queries[q].id, documents[candidates[i]].id, Label::kNegative});
      }
    }
    return Dataset::Create(c.vocab_size, std::move(qs), documents, std::move(samples),
                           std::move(pools));
  };

  CorpusSplit split;
  split.train = build(train_members);
  split.test = build(test_members);
  return split;
}

StatsRecord DatasetStats(const Dataset& d) {
  StatsRecord s;
  s.pairwise_samples = d.samples().size();
  std::map<std::string, std::size_t> positives;
  std::map<std::string, std::size_t> doc_queries;
  for (const std::string& qid : d.sample_query_ids()) positives[qid] = 0;
  for (const Sample& sample : d.samples()) {
    if (!sample.positive()) continue;
    ++positives[sample.query_id];
    ++doc_queries[sample.doc_id];
  }
  s.queries = positives.size();
  std::size_t total = 0;
  for (const auto& [qid, n] : positives) {
    total += n;
    if (n > 1) ++s.queries_with_multiple_positives;
  }
  for (const auto& [did, n] : doc_queries) {
    if (n > 1) ++s.shared_positive_docs;
  }
  if (s.queries > 0) {
    s.mean_positives_per_query = static_cast<double>(total) / s.queries;
  }
  if (!d.pools().empty()) {
    std::size_t pool_total = 0;
    for (const auto& [qid, pool] : d.pools()) pool_total += pool.size();
    s.mean_pool_size = static_cast<double>(pool_total) / d.pools().size();
  }
  return s;
}

}  // namespace numur
