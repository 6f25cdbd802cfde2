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


#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "numur/report.hpp"

using namespace numur;
using namespace numur::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("usage errors carry the machine-readable prefix") {
  const Result none = Cli({});
  CHECK(none.code != 0);
  CHECK(none.err.rfind("ERROR:usage:", 0) == 0);
  CHECK(Cli({"frobnicate"}).err.rfind("ERROR:", 0) == 0);
  CHECK(Cli({"--help"}).code == 0);
}

TEST_CASE("gen writes the corpus and one spec per kind and fraction") {
  const fs::path dir = ScratchDir("cli_gen");
  const Result r = Cli({"gen", "--out", dir.string(), "--fractions", "0.1,0.25",
                        "--kinds", "document"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "train" / "qrels.tsv"));
  CHECK(fs::exists(dir / "test" / "pools.tsv"));
  CHECK(fs::exists(dir / "specs" / "document_0.1.json"));
  CHECK(fs::exists(dir / "specs" / "document_0.25.json"));
  CHECK_FALSE(fs::exists(dir / "specs" / "query_0.25.json"));

  const std::string before = ReadTextFile(dir / "train" / "qrels.tsv");
  REQUIRE(Cli({"gen", "--out", dir.string()}).code == 0);
  CHECK(ReadTextFile(dir / "train" / "qrels.tsv") == before);

  const Result bad = Cli({"gen", "--out", dir.string(), "--fractions", "1.5"});
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("ERROR:invalid_argument:", 0) == 0);
}

TEST_CASE("an empty fraction list in the config is an error") {
  const fs::path dir = ScratchDir("cli_cfg");
  WriteTextFile(dir / "cfg.json", "{\"fractions\": []}");
  const Result r = Cli({"gen", "--config", (dir / "cfg.json").string(), "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("fraction list is empty") != std::string::npos);
  WriteTextFile(dir / "typo.json", "{\"corpsu\": {}}");
  CHECK(Cli({"gen", "--config", (dir / "typo.json").string()}).err.rfind("ERROR:parse:", 0) == 0);
}

TEST_CASE("train, unlearn and report from the command line") {
  const fs::path dir = ScratchDir("cli_pipeline");
  const std::string corpus = (dir / "corpus").string();
  const std::string spec = (dir / "corpus" / "specs" / "document_0.25.json").string();
  REQUIRE(Cli({"gen", "--out", corpus}).code == 0);
  REQUIRE(Cli({"train", "--data", corpus, "--epochs", "8", "--out", (dir / "train").string()})
              .code == 0);
  CHECK(fs::exists(dir / "train" / "model.bin"));

  const Result missing = Cli({"train", "--data", (dir / "nowhere").string()});
  CHECK(missing.err.find("nowhere") != std::string::npos);

  // A saved model scores exactly like the in-memory one it came from.
  const Model loaded = LoadModel(dir / "train" / "model.bin");
  TrainConfig tc;
  tc.epochs = 8;
  const CorpusSplit split = GenerateSynthetic({});
  CHECK(loaded == Train(split, tc).model);

  REQUIRE(Cli({"retrain", "--data", corpus, "--spec", spec, "--train", (dir / "train").string(),
               "--out", (dir / "retrain").string()})
              .code == 0);
  const Result immediate =
      Cli({"unlearn", "--data", corpus, "--spec", spec, "--train", (dir / "train").string(),
           "--delta", "1.0", "--out", (dir / "now").string()});
  REQUIRE(immediate.code == 0);
  CHECK(ReadJsonFile(dir / "now" / "report.json")["epochs_run"] == 0);

  const Result ssd = Cli({"unlearn", "--data", corpus, "--spec", spec, "--train",
                          (dir / "train").string(), "--method", "ssd", "--out",
                          (dir / "ssd").string()});
  REQUIRE(ssd.code == 0);
  CHECK(ParseTrajectoryCsv(ReadTextFile(dir / "ssd" / "trajectory.csv")).size() == 1);

  const Result no_retrain =
      Cli({"unlearn", "--data", corpus, "--spec", spec, "--train", (dir / "train").string(),
           "--dest", "d2", "--out", (dir / "x").string()});
  CHECK(no_retrain.code == 1);
  CHECK(no_retrain.err.rfind("ERROR:invalid_argument:", 0) == 0);
  CHECK(Cli({"unlearn", "--data", corpus, "--spec", spec, "--train", (dir / "train").string(),
             "--method", "sisa"})
            .err.rfind("ERROR:invalid_argument:", 0) == 0);

  const Result d2 = Cli({"unlearn", "--data", corpus, "--spec", spec, "--train",
                         (dir / "train").string(), "--retrain", (dir / "retrain").string(),
                         "--dest", "d2", "--max-epochs", "300", "--out", (dir / "d2").string()});
  REQUIRE(d2.code == 0);
  const Json rep = ReadJsonFile(dir / "d2" / "report.json");
  const Json retrain = ReadJsonFile(dir / "retrain" / "report.json");
  CHECK(rep["delta_target"].get<double>() == retrain["mrr_test"].get<double>());
  if (rep["stopped_early"].get<bool>()) {
    CHECK(rep["mrr_forget"].get<double>() <= retrain["mrr_test"].get<double>());
  }
  // normalized_forget recomputed from the stored values matches.
  CHECK(rep["normalized_forget"].get<double>() ==
        doctest::Approx(1.0 - std::abs(rep["mrr_forget"].get<double>() -
                                       retrain["mrr_test"].get<double>())));

  const Result report = Cli({"report", (dir / "d2").string(), "--out", (dir / "rep").string()});
  REQUIRE(report.code == 0);
  const std::string csv = ReadTextFile(dir / "rep" / "report.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  CHECK(fs::exists(dir / "rep" / "radar.svg"));
  CHECK(fs::exists(dir / "rep" / "forget_trajectory.svg"));
  CHECK(Cli({"report", (dir / "nothing").string()}).err.rfind("ERROR:not_found:", 0) == 0);

  const Result ev = Cli({"eval", "--data", corpus, "--model",
                         (dir / "train" / "model.bin").string(), "--spec", spec, "--out",
                         (dir / "eval").string()});
  REQUIRE(ev.code == 0);
  CHECK(fs::exists(dir / "eval" / "distributions.csv"));
}
