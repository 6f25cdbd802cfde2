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

#include "numur/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "json.hpp"
#include "numur/error.hpp"

namespace numur {

using json = nlohmann::json;

const char* RemovalKindName(RemovalKind kind) {
  return kind == RemovalKind::kQuery ? "query" : "document";
}

void ForgetSpec::Validate(const Dataset& d) const {
  if (ids.empty()) Fail(ErrorCode::kInvalidArgument, "forget spec has no ids");
  for (const std::string& id : ids) {
    const bool ok = kind == RemovalKind::kQuery ? d.has_query(id) : d.has_document(id);
    if (!ok) {
      Fail(ErrorCode::kDanglingRef, std::string("forget spec ") + RemovalKindName(kind) +
                                        " id '" + id + "' not in dataset");
    }
  }
}

ForgetSpec LoadForgetSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  ForgetSpec spec;
  try {
    json j = json::parse(in);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "query") {
      spec.kind = RemovalKind::kQuery;
    } else if (kind == "document") {
      spec.kind = RemovalKind::kDocument;
    } else {
      Fail(ErrorCode::kParse, "forget spec kind must be 'query' or 'document'");
    }
    for (const auto& id : j.at("ids")) spec.ids.insert(id.get<std::string>());
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParse, "malformed forget spec '" + path.string() + "': " + e.what());
  }
  return spec;
}

void SaveForgetSpec(const ForgetSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  json j;
  j["kind"] = RemovalKindName(spec.kind);
  j["ids"] = std::vector<std::string>(spec.ids.begin(), spec.ids.end());
  out << j.dump(2) << '\n';
}

std::vector<Sample> Partition::retained() const {
  std::vector<Sample> out = entangled;
  out.insert(out.end(), disjoint.begin(), disjoint.end());
  return out;
}

Partition MakePartition(const Dataset& d, const ForgetSpec& spec) {
  spec.Validate(d);
  Partition p;
  p.kind = spec.kind;
  std::vector<bool> in_forget(d.samples().size(), false);
  for (std::size_t i = 0; i < d.samples().size(); ++i) {
    const Sample& s = d.samples()[i];
    const std::string& key = spec.kind == RemovalKind::kQuery ? s.query_id : s.doc_id;
    if (spec.contains(key)) {
      in_forget[i] = true;
      p.forget.push_back(s);
      p.forget_queries.insert(s.query_id);
      p.forget_docs.insert(s.doc_id);
    }
  }
  if (!d.samples().empty() && p.forget.size() == d.samples().size()) {
    Fail(ErrorCode::kInvalidArgument, "forget set covers every sample; nothing to retain");
  }
  for (std::size_t i = 0; i < d.samples().size(); ++i) {
    if (in_forget[i]) continue;
    const Sample& s = d.samples()[i];
    if (p.forget_queries.count(s.query_id) || p.forget_docs.count(s.doc_id)) {
      p.entangled.push_back(s);
    } else {
      p.disjoint.push_back(s);
    }
  }
  return p;
}

std::vector<Sample> EntangledPartners(const Partition& p, const Sample& x) {
  if (std::find(p.forget.begin(), p.forget.end(), x) == p.forget.end()) {
    Fail(ErrorCode::kInvalidArgument,
         "sample (" + x.query_id + ", " + x.doc_id + ") is not in the forget set");
  }
  std::vector<Sample> out;
  for (const Sample& e : p.entangled) {
    if (e.query_id == x.query_id || e.doc_id == x.doc_id) out.push_back(e);
  }
  return out;
}

ForgetSpec SampleForgetSpec(const Dataset& d, RemovalKind kind, double fraction,
                            std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "removal fraction must lie in (0, 1)");
  }
  // Positive pairs covered by each candidate id.
  std::map<std::string, std::size_t> cover;
  std::size_t total = 0;
  for (const Sample& s : d.samples()) {
    if (!s.positive()) continue;
    ++total;
    ++cover[kind == RemovalKind::kQuery ? s.query_id : s.doc_id];
  }
  if (total == 0) Fail(ErrorCode::kInfeasible, "dataset has no positive pairs");
  std::vector<std::string> candidates;
  for (const auto& [id, n] : cover) candidates.push_back(id);
  std::mt19937_64 rng(seed);
  std::shuffle(candidates.begin(), candidates.end(), rng);

  const double target = fraction * static_cast<double>(total);
  ForgetSpec spec;
  spec.kind = kind;
  std::size_t covered = 0;
  for (const std::string& id : candidates) {
    if (static_cast<double>(covered) >= target) break;
    // Stop before an id whose coverage would overshoot more than stopping short.
    const double after = static_cast<double>(covered + cover[id]);
    if (!spec.ids.empty() && after - target > target - static_cast<double>(covered)) {
      continue;
    }
    spec.ids.insert(id);
    covered += cover[id];
  }
  if (spec.ids.size() == candidates.size()) {
    Fail(ErrorCode::kInfeasible, "removal fraction leaves nothing to retain");
  }
  return spec;
}

void SavePartition(const Partition& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << "set\tquery_id\tdoc_id\tlabel\n";
  auto emit = [&](const char* name, const std::vector<Sample>& samples) {
    for (const Sample& s : samples) {
      out << name << '\t' << s.query_id << '\t' << s.doc_id << '\t'
          << (s.positive() ? 1 : 0) << '\n';
    }
  };
  emit("forget", p.forget);
  emit("entangled", p.entangled);
  emit("disjoint", p.disjoint);
}

}  // namespace numur
