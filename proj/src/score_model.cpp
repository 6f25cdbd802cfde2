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

#include "numur/score_model.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace numur {

namespace {

void PutU32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

void PutF64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint32_t GetU32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
    Fail(ErrorCode::kParse, "model file truncated");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

double GetF64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
    Fail(ErrorCode::kParse, "model file truncated");
  }
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

void SaveModel(const Model& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out.write("NUMR", 4);
  PutU32(out, kModelFormatVersion);
  PutU32(out, static_cast<std::uint32_t>(m.vocab_size()));
  PutU32(out, static_cast<std::uint32_t>(m.dim()));
  for (Eigen::Index i = 0; i < m.embed_q().size(); ++i) PutF64(out, m.embed_q().data()[i]);
  for (Eigen::Index i = 0; i < m.embed_d().size(); ++i) PutF64(out, m.embed_d().data()[i]);
  if (!out) Fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

Model LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "NUMR", 4) != 0) {
    Fail(ErrorCode::kParse, "'" + path.string() + "' is not a model file");
  }
  const std::uint32_t version = GetU32(in);
  if (version != kModelFormatVersion) {
    Fail(ErrorCode::kParse, "unsupported model version " + std::to_string(version));
  }
  const std::uint32_t vocab = GetU32(in);
  const std::uint32_t dim = GetU32(in);
  if (vocab == 0 || dim == 0) Fail(ErrorCode::kParse, "model has empty shape");
  Model m(static_cast<int>(vocab), static_cast<int>(dim));
  for (Eigen::Index i = 0; i < m.embed_q().size(); ++i) m.embed_q().data()[i] = GetF64(in);
  for (Eigen::Index i = 0; i < m.embed_d().size(); ++i) m.embed_d().data()[i] = GetF64(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    Fail(ErrorCode::kParse, "trailing bytes after model payload");
  }
  if (!m.all_finite()) Fail(ErrorCode::kParse, "model contains non-finite parameters");
  return m;
}

}  // namespace numur
