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


#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "numur/corpus.hpp"
#include "numur/error.hpp"
#include "numur/eval.hpp"
#include "numur/partition.hpp"
#include "numur/ranker.hpp"
#include "numur/report.hpp"
#include "numur/unlearn.hpp"

namespace numur::cli {
namespace fs = std::filesystem;

namespace {

// Everything --config may set. Command-line flags override it.
struct ExperimentConfig {
  SyntheticConfig corpus;
  TrainConfig train;
  UnlearnConfig unlearn;
  std::vector<double> fractions{0.05, 0.15, 0.25};
  std::vector<RemovalKind> kinds{RemovalKind::kDocument, RemovalKind::kQuery};
};

RemovalKind ParseKind(const std::string& s) {
  if (s == "query") return RemovalKind::kQuery;
  if (s == "document") return RemovalKind::kDocument;
  Fail(ErrorCode::kInvalidArgument, "unknown removal kind '" + s + "'");
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  ExperimentConfig c;
  if (path.empty()) return c;
  const Json j = ReadJsonFile(path);
  if (!j.is_object()) Fail(ErrorCode::kParse, path + ": config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (k == "corpus") {
      c.corpus = SyntheticConfigFromJson(v, c.corpus);
    } else if (k == "train") {
      c.train = TrainConfigFromJson(v, c.train);
    } else if (k == "unlearn") {
      c.unlearn = UnlearnConfigFromJson(v, c.unlearn);
    } else if (k == "fractions") {
      if (!v.is_array()) Fail(ErrorCode::kParse, "fractions must be an array");
      c.fractions.clear();
      for (const auto& f : v) {
        if (!f.is_number()) Fail(ErrorCode::kParse, "fractions must be numbers");
        c.fractions.push_back(f.get<double>());
      }
    } else if (k == "kinds") {
      if (!v.is_array()) Fail(ErrorCode::kParse, "kinds must be an array");
      c.kinds.clear();
      for (const auto& s : v) {
        if (!s.is_string()) Fail(ErrorCode::kParse, "kinds must be strings");
        c.kinds.push_back(ParseKind(s.get<std::string>()));
      }
    } else {
      Fail(ErrorCode::kParse, "unknown key '" + k + "' in " + path);
    }
  }
  return c;
}

CorpusSplit LoadSplit(const fs::path& data) {
  if (!fs::is_directory(data)) Fail(ErrorCode::kNotFound, "no corpus directory " + data.string());
  return CorpusSplit{LoadDatasetDir(data / "train"), LoadDatasetDir(data / "test")};
}

// Creates the parent directory of `file` and returns `file`.
fs::path Prepared(const fs::path& file) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory " + file.parent_path().string());
  return file;
}

void RequireFile(const fs::path& p) {
  if (!fs::exists(p)) Fail(ErrorCode::kNotFound, "missing file " + p.string());
}

// Training config a model was fitted with, if recorded next to it.
TrainConfig TrainConfigOf(const fs::path& run_dir, const TrainConfig& fallback) {
  const fs::path cfg = run_dir / "run_config.json";
  if (!fs::exists(cfg)) return fallback;
  const Json j = ReadJsonFile(cfg);
  if (!j.contains("train")) Fail(ErrorCode::kParse, cfg.string() + " lacks a train section");
  return TrainConfigFromJson(j.at("train"));
}

std::string FractionTag(double f) {
  std::ostringstream s;
  s << f;
  return s.str();
}

Json SetMetricsJson(const SetMetrics& m) {
  return Json{{"mrr_forget", m.forget},
              {"mrr_entangled", m.entangled},
              {"mrr_disjoint", m.disjoint},
              {"mrr_test", m.test},
              {"forget_excluded", m.forget_excluded}};
}

void WriteTrainRun(const fs::path& out, const TrainResult& r, const Json& run_config) {
  SaveModel(r.model, Prepared(out / "model.bin"));
  WriteTextFile(out / "trajectory.csv", TrainTrajectoryCsv(r.trajectory));
  WriteJsonFile(out / "run_config.json", run_config);
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "numur_out";

  // Shared by several subcommands.
  std::string data;
  std::string spec;
  std::string train_dir;
  std::string retrain_dir;
  std::string model;

  // gen
  std::vector<double> fractions;
  std::vector<std::string> kinds;

  // train / retrain
  std::optional<int> epochs;
  std::optional<double> train_lr;

  // partition
  std::optional<double> fraction;
  std::string kind = "document";

  // unlearn
  std::string method = "cocol";
  std::optional<double> delta;
  std::string dest;
  bool all_methods = false;
  std::optional<int> max_epochs;
  std::optional<double> unlearn_lr;
  std::optional<int> check_every;
  bool no_entangled_term = false;
  bool no_consistent_phase = false;
  std::optional<double> ssd_alpha;
  std::optional<double> ssd_lambda;

  // report
  std::vector<std::string> run_dirs;
};

ExperimentConfig Resolve(const Options& o) {
  ExperimentConfig c = LoadExperimentConfig(o.config);
  if (o.seed) {
    c.corpus.seed = *o.seed;
    c.train.seed = *o.seed;
    c.unlearn.seed = *o.seed;
  }
  if (o.epochs) c.train.epochs = *o.epochs;
  if (o.train_lr) c.train.learning_rate = *o.train_lr;
  return c;
}

void CmdGen(const Options& o, std::ostream& out) {
  ExperimentConfig c = Resolve(o);
  if (!o.fractions.empty()) c.fractions = o.fractions;
  if (!o.kinds.empty()) {
    c.kinds.clear();
    for (const auto& k : o.kinds) c.kinds.push_back(ParseKind(k));
  }
  if (c.fractions.empty()) Fail(ErrorCode::kInvalidArgument, "fraction list is empty");
  if (c.kinds.empty()) Fail(ErrorCode::kInvalidArgument, "removal kind list is empty");
  for (double f : c.fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "fraction " + FractionTag(f) + " not in (0,1)");
    }
  }
  const fs::path root = o.out;
  const CorpusSplit split = GenerateSynthetic(c.corpus);
  SaveDatasetDir(split.train, root / "train");
  SaveDatasetDir(split.test, root / "test");
  WriteJsonFile(root / "corpus_config.json", ToJson(c.corpus));
  const StatsRecord st = DatasetStats(split.train);
  WriteJsonFile(root / "stats.json",
                Json{{"queries", st.queries},
                     {"queries_with_multiple_positives", st.queries_with_multiple_positives},
                     {"mean_positives_per_query", st.mean_positives_per_query},
                     {"mean_pool_size", st.mean_pool_size},
                     {"pairwise_samples", st.pairwise_samples},
                     {"shared_positive_docs", st.shared_positive_docs}});
  for (RemovalKind kind : c.kinds) {
    for (double f : c.fractions) {
      const ForgetSpec spec = SampleForgetSpec(split.train, kind, f, c.corpus.seed);
      const fs::path p =
          root / "specs" / (std::string(RemovalKindName(kind)) + "_" + FractionTag(f) + ".json");
      SaveForgetSpec(spec, Prepared(p));
      out << p.string() << ": " << spec.ids.size() << " ids\n";
    }
  }
  out << "corpus written to " << root.string() << "\n";
}

void CmdTrain(const Options& o, std::ostream& out) {
  const ExperimentConfig c = Resolve(o);
  const CorpusSplit split = LoadSplit(o.data);
  const TrainResult r = Train(split, c.train);
  WriteTrainRun(o.out, r, Json{{"command", "train"}, {"train", ToJson(c.train)}});
  out << "train mrr " << FormatNumber(r.trajectory.empty() ? 0.0 : r.trajectory.back().train_mrr)
      << " after " << c.train.epochs << " epochs\n";
}

void CmdRetrain(const Options& o, std::ostream& out) {
  ExperimentConfig c = Resolve(o);
  if (!o.train_dir.empty()) c.train = TrainConfigOf(o.train_dir, c.train);
  const CorpusSplit split = LoadSplit(o.data);
  RequireFile(o.spec);
  const ForgetSpec spec = LoadForgetSpec(o.spec);
  spec.Validate(split.train);
  const Partition p = MakePartition(split.train, spec);
  const TrainResult r = Retrain(split, c.train, p);
  WriteTrainRun(o.out, r, Json{{"command", "retrain"}, {"train", ToJson(c.train)}});
  const SetMetrics m = EvaluateSets(r.model, split, p, spec);
  Json rep = SetMetricsJson(m);
  rep["method"] = "retrain";
  rep["normalized_forget"] = NormalizedForget(m.forget, m.test);
  rep["epochs_run"] = c.train.epochs;
  WriteJsonFile(fs::path(o.out) / "report.json", rep);
  out << "retrain forget mrr " << FormatNumber(m.forget) << " test mrr " << FormatNumber(m.test)
      << "\n";
}

void CmdPartition(const Options& o, std::ostream& out) {
  const CorpusSplit split = LoadSplit(o.data);
  ForgetSpec spec;
  if (!o.spec.empty()) {
    RequireFile(o.spec);
    spec = LoadForgetSpec(o.spec);
  } else if (o.fraction) {
    const ExperimentConfig c = Resolve(o);
    spec = SampleForgetSpec(split.train, ParseKind(o.kind), *o.fraction, c.corpus.seed);
    SaveForgetSpec(spec, Prepared(fs::path(o.out) / "forget_spec.json"));
  } else {
    Fail(ErrorCode::kInvalidArgument, "partition needs --spec or --fraction");
  }
  spec.Validate(split.train);
  const Partition p = MakePartition(split.train, spec);
  SavePartition(p, Prepared(fs::path(o.out) / "partition.tsv"));
  WriteJsonFile(fs::path(o.out) / "partition.json",
                Json{{"kind", RemovalKindName(p.kind)},
                     {"forget", p.forget.size()},
                     {"entangled", p.entangled.size()},
                     {"disjoint", p.disjoint.size()},
                     {"forget_queries", p.forget_queries.size()},
                     {"forget_docs", p.forget_docs.size()}});
  out << "F " << p.forget.size() << " E " << p.entangled.size() << " D " << p.disjoint.size()
      << "\n";
}

void CmdUnlearn(const Options& o, std::ostream& out) {
  ExperimentConfig c = Resolve(o);
  if (o.train_dir.empty()) Fail(ErrorCode::kInvalidArgument, "unlearn needs --train <run dir>");
  const fs::path train_dir = o.train_dir;
  RequireFile(train_dir / "model.bin");
  RequireFile(train_dir / "trajectory.csv");
  const CorpusSplit split = LoadSplit(o.data);
  RequireFile(o.spec);
  const ForgetSpec spec = LoadForgetSpec(o.spec);
  spec.Validate(split.train);
  const Partition p = MakePartition(split.train, spec);
  const UnlearnTask task{split, p, spec};

  const Model m_train = LoadModel(train_dir / "model.bin");
  const std::vector<TrainEpoch> train_traj =
      ParseTrainTrajectoryCsv(ReadTextFile(train_dir / "trajectory.csv"));
  std::vector<double> train_seconds;
  for (const auto& e : train_traj) train_seconds.push_back(e.wall_time_s);

  UnlearnConfig u = c.unlearn;
  u.training = TrainConfigOf(train_dir, c.train);
  if (o.max_epochs) u.max_epochs = *o.max_epochs;
  if (o.unlearn_lr) u.learning_rate = *o.unlearn_lr;
  if (o.check_every) u.check_every = *o.check_every;
  if (o.ssd_alpha) u.params.ssd_alpha = *o.ssd_alpha;
  if (o.ssd_lambda) u.params.ssd_lambda = *o.ssd_lambda;
  if (o.no_entangled_term) u.params.entangled_term = false;
  if (o.no_consistent_phase) u.params.consistent_phase = false;

  std::optional<double> retrain_test;
  std::optional<Destinations> dest;
  if (!o.retrain_dir.empty()) {
    const fs::path model = fs::path(o.retrain_dir) / "model.bin";
    RequireFile(model);
    const Model m_retrain = LoadModel(model);
    dest = ComputeDestinations(m_retrain, task);
    retrain_test = dest->d2;
  }
  if (!o.dest.empty() && o.delta) {
    Fail(ErrorCode::kInvalidArgument, "--dest and --delta are mutually exclusive");
  }
  if (!o.dest.empty()) {
    if (!dest) Fail(ErrorCode::kInvalidArgument, "--dest needs --retrain <run dir>");
    if (o.dest == "d1") u.delta_target = dest->d1;
    else if (o.dest == "d2") u.delta_target = dest->d2;
    else if (o.dest == "d3") u.delta_target = dest->d3;
    else Fail(ErrorCode::kInvalidArgument, "unknown destination '" + o.dest + "'");
  } else if (o.delta) {
    u.delta_target = *o.delta;
  }

  std::vector<Method> methods;
  if (o.all_methods) methods = AllMethods();
  else methods.push_back(ParseMethod(o.method));

  const std::size_t excluded = MrrForget(m_train, split.train, p, spec).excluded;
  std::vector<MetricsReport> reports;
  for (Method m : methods) {
    u.method = m;
    u.Validate();
    const UnlearnRun run = Unlearn(m_train, task, u);
    const fs::path dir = o.all_methods ? fs::path(o.out) / MethodName(m) : fs::path(o.out);
    const MetricsReport rep = Summarize(run, u, excluded, train_seconds, retrain_test);
    SaveModel(run.final_model, Prepared(dir / "model.bin"));
    WriteTextFile(dir / "trajectory.csv", TrajectoryCsv(run.trajectory));
    WriteJsonFile(dir / "report.json", ToJson(rep));
    WriteJsonFile(dir / "run_config.json", ToJson(u));
    reports.push_back(rep);
    out << MethodName(m) << ": epochs " << run.epochs_run << " F "
        << FormatNumber(rep.mrr_forget) << " E " << FormatNumber(rep.mrr_entangled) << " D "
        << FormatNumber(rep.mrr_disjoint) << " T " << FormatNumber(rep.mrr_test) << "\n";
  }
  if (o.all_methods) WriteTextFile(fs::path(o.out) / "report.csv", ReportCsv(reports));
}

void CmdEval(const Options& o, std::ostream& out) {
  ExperimentConfig c = Resolve(o);
  if (o.model.empty()) Fail(ErrorCode::kInvalidArgument, "eval needs --model <model.bin>");
  RequireFile(o.model);
  const CorpusSplit split = LoadSplit(o.data);
  const Model m = LoadModel(o.model);
  // M_init is rebuilt from the training config recorded beside the model.
  const TrainConfig tc = TrainConfigOf(fs::path(o.model).parent_path(), c.train);
  const Model m_init = InitialModel(split.train.vocab_size(), tc);
  if (m_init.dim() != m.dim() || m_init.vocab_size() != m.vocab_size()) {
    Fail(ErrorCode::kInvariant, "model shape does not match its training config");
  }

  Json result;
  std::vector<NamedSet> sets;
  if (!o.spec.empty()) {
    RequireFile(o.spec);
    const ForgetSpec spec = LoadForgetSpec(o.spec);
    spec.Validate(split.train);
    const Partition p = MakePartition(split.train, spec);
    result = SetMetricsJson(EvaluateSets(m, split, p, spec));
    sets = {{"forget", p.forget}, {"entangled", p.entangled}, {"disjoint", p.disjoint}};
  } else {
    result = Json{{"mrr_train", MrrSet(m, split.train, split.train.samples()).value},
                  {"mrr_test", MrrSet(m, split.test, split.test.samples()).value}};
  }
  sets.push_back({"train", split.train.samples()});
  WriteJsonFile(fs::path(o.out) / "eval.json", result);
  const auto dists = ScoreDistributions({{"init", &m_init}, {"model", &m}}, split.train, sets);
  WriteTextFile(fs::path(o.out) / "distributions.csv", DistributionsCsv(dists));
  out << result.dump() << "\n";
}

void CmdReport(const Options& o, std::ostream& out) {
  if (o.run_dirs.empty()) Fail(ErrorCode::kInvalidArgument, "report needs at least one run dir");
  std::vector<MetricsReport> reports;
  std::vector<LineSeries> forget_lines;
  std::vector<RadarSeries> radar;
  std::map<std::string, int> seen;
  for (const auto& d : o.run_dirs) {
    const fs::path dir = d;
    RequireFile(dir / "report.json");
    RequireFile(dir / "trajectory.csv");
    MetricsReport r = MetricsReportFromJson(ReadJsonFile(dir / "report.json"));
    const auto traj = ParseTrajectoryCsv(ReadTextFile(dir / "trajectory.csv"));
    std::string label = r.method;
    if (seen[r.method]++ > 0) label += " (" + dir.filename().string() + ")";
    LineSeries ls{label, {}, {}};
    for (const auto& e : traj) {
      ls.x.push_back(e.epoch);
      ls.y.push_back(e.mrr_forget);
    }
    forget_lines.push_back(std::move(ls));
    radar.push_back({label,
                     {r.mrr_forget, r.mrr_entangled, r.mrr_disjoint, r.mrr_test,
                      r.normalized_forget}});
    reports.push_back(std::move(r));
  }
  const fs::path root = o.out;
  WriteTextFile(root / "report.csv", ReportCsv(reports));
  WriteTextFile(root / "forget_trajectory.svg",
                LineChartSvg("Forget-set MRR per unlearning epoch", "epoch", "MRR", forget_lines));
  WriteTextFile(root / "radar.svg",
                RadarChartSvg("Set MRR at termination", {"F", "E", "D", "T", "norm. forget"}, radar));
  out << reports.size() << " runs summarised in " << root.string() << "\n";
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural machine unranking experiments", "numur"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "experiment config JSON");
  app.add_option("--seed", o.seed, "seed for corpus, training and unlearning");
  app.add_option("--out", o.out, "output directory");

  auto* gen = app.add_subcommand("gen", "generate a synthetic corpus and forget specs");
  gen->add_option("--fractions", o.fractions, "removal fractions of positive pairs")
      ->delimiter(',');
  gen->add_option("--kinds", o.kinds, "removal kinds: document, query")->delimiter(',');

  auto* train = app.add_subcommand("train", "fit M_train on the training split");
  auto* retrain = app.add_subcommand("retrain", "fit M_retrain on the retained samples");
  for (auto* sc : {train, retrain}) {
    sc->add_option("--data", o.data, "corpus directory")->required();
    sc->add_option("--epochs", o.epochs, "training epochs");
    sc->add_option("--lr", o.train_lr, "training learning rate");
  }
  retrain->add_option("--spec", o.spec, "forget spec JSON")->required();
  retrain->add_option("--train", o.train_dir, "M_train run dir whose config to reuse");

  auto* part = app.add_subcommand("partition", "split the training set into F, E and D");
  part->add_option("--data", o.data, "corpus directory")->required();
  part->add_option("--spec", o.spec, "forget spec JSON");
  part->add_option("--fraction", o.fraction, "sample a spec covering this fraction");
  part->add_option("--kind", o.kind, "removal kind for --fraction");

  auto* unl = app.add_subcommand("unlearn", "unlearn a forget spec from M_train");
  unl->add_option("--data", o.data, "corpus directory")->required();
  unl->add_option("--spec", o.spec, "forget spec JSON")->required();
  unl->add_option("--train", o.train_dir, "M_train run dir")->required();
  unl->add_option("--retrain", o.retrain_dir, "M_retrain run dir");
  unl->add_option("--method", o.method, "cocol, cf, amnesiac, neggrad, ssd or badt");
  unl->add_option("--delta", o.delta, "target forget MRR");
  unl->add_option("--dest", o.dest, "destination d1, d2 or d3 (needs --retrain)");
  unl->add_flag("--all-methods", o.all_methods, "run every method into <out>/<method>");
  unl->add_option("--max-epochs", o.max_epochs, "epoch budget");
  unl->add_option("--lr", o.unlearn_lr, "unlearning learning rate");
  unl->add_option("--check-every", o.check_every, "stopping check period in epochs");
  unl->add_flag("--no-entangled-term", o.no_entangled_term, "ablate the entangled partner term");
  unl->add_flag("--no-consistent-phase", o.no_consistent_phase, "ablate the disjoint phase");
  unl->add_option("--ssd-alpha", o.ssd_alpha, "SSD selection threshold");
  unl->add_option("--ssd-lambda", o.ssd_lambda, "SSD dampening constant");

  auto* ev = app.add_subcommand("eval", "evaluate a model and its score distributions");
  ev->add_option("--data", o.data, "corpus directory")->required();
  ev->add_option("--model", o.model, "model.bin")->required();
  ev->add_option("--spec", o.spec, "forget spec JSON");

  auto* rep = app.add_subcommand("report", "aggregate unlearning runs into tables and charts");
  rep->add_option("runs", o.run_dirs, "run directories")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ERROR:usage:" << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) CmdGen(o, out);
    else if (train->parsed()) CmdTrain(o, out);
    else if (retrain->parsed()) CmdRetrain(o, out);
    else if (part->parsed()) CmdPartition(o, out);
    else if (unl->parsed()) CmdUnlearn(o, out);
    else if (ev->parsed()) CmdEval(o, out);
    else if (rep->parsed()) CmdReport(o, out);
  } catch (const Error& e) {
    err << "ERROR:" << ErrorCodeName(e.code()) << ":" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "ERROR:internal:" << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace numur::cli
