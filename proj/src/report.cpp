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


#include "numur/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "numur/error.hpp"

namespace numur {

void WriteTextFile(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create directory " + path.parent_path().string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ReadJsonFile(const std::filesystem::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const Json& j) {
  WriteTextFile(path, j.dump(2) + "\n");
}

std::string FormatNumber(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

namespace {

[[noreturn]] void BadKey(const std::string& where, const std::string& key) {
  Fail(ErrorCode::kParse, "unknown key '" + key + "' in " + where);
}

template <typename T>
T Get(const Json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const Json::exception&) {
    Fail(ErrorCode::kParse, "bad value for '" + key + "'");
  }
}

void RequireObject(const Json& j, const std::string& where) {
  if (!j.is_object()) Fail(ErrorCode::kParse, where + " must be a JSON object");
}

}  // namespace

Json ToJson(const SyntheticConfig& c) {
  return Json{{"n_queries", c.n_queries},
              {"n_docs", c.n_docs},
              {"vocab_size", c.vocab_size},
              {"positives_per_query", c.positives_per_query},
              {"pool_size", c.pool_size},
              {"entanglement_rate", c.entanglement_rate},
              {"test_fraction", c.test_fraction},
              {"seed", c.seed},
              {"negatives_per_query", c.negatives_per_query},
              {"block_tokens", c.block_tokens},
              {"query_noise_tokens", c.query_noise_tokens},
              {"doc_noise_tokens", c.doc_noise_tokens},
              {"signal_vocab", c.signal_vocab},
              {"common_vocab", c.common_vocab},
              {"query_common_tokens", c.query_common_tokens},
              {"doc_common_tokens", c.doc_common_tokens}};
}

SyntheticConfig SyntheticConfigFromJson(const Json& j, SyntheticConfig c) {
  RequireObject(j, "corpus config");
  for (const auto& [k, v] : j.items()) {
    if (k == "n_queries") c.n_queries = Get<int>(v, k);
    else if (k == "n_docs") c.n_docs = Get<int>(v, k);
    else if (k == "vocab_size") c.vocab_size = Get<int>(v, k);
    else if (k == "positives_per_query") c.positives_per_query = Get<int>(v, k);
    else if (k == "pool_size") c.pool_size = Get<int>(v, k);
    else if (k == "entanglement_rate") c.entanglement_rate = Get<double>(v, k);
    else if (k == "test_fraction") c.test_fraction = Get<double>(v, k);
    else if (k == "seed") c.seed = Get<std::uint64_t>(v, k);
    else if (k == "negatives_per_query") c.negatives_per_query = Get<int>(v, k);
    else if (k == "block_tokens") c.block_tokens = Get<int>(v, k);
    else if (k == "query_noise_tokens") c.query_noise_tokens = Get<int>(v, k);
    else if (k == "doc_noise_tokens") c.doc_noise_tokens = Get<int>(v, k);
    else if (k == "signal_vocab") c.signal_vocab = Get<int>(v, k);
    else if (k == "common_vocab") c.common_vocab = Get<int>(v, k);
    else if (k == "query_common_tokens") c.query_common_tokens = Get<int>(v, k);
    else if (k == "doc_common_tokens") c.doc_common_tokens = Get<int>(v, k);
    else BadKey("corpus config", k);
  }
  return c;
}

Json ToJson(const TrainConfig& c) {
  return Json{{"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"margin", c.margin},
              {"seed", c.seed},
              {"negatives_per_positive", c.negatives_per_positive},
              {"dim", c.dim},
              {"init_scale", c.init_scale}};
}

TrainConfig TrainConfigFromJson(const Json& j, TrainConfig c) {
  RequireObject(j, "train config");
  for (const auto& [k, v] : j.items()) {
    if (k == "learning_rate") c.learning_rate = Get<double>(v, k);
    else if (k == "epochs") c.epochs = Get<int>(v, k);
    else if (k == "margin") c.margin = Get<double>(v, k);
    else if (k == "seed") c.seed = Get<std::uint64_t>(v, k);
    else if (k == "negatives_per_positive") c.negatives_per_positive = Get<int>(v, k);
    else if (k == "dim") c.dim = Get<int>(v, k);
    else if (k == "init_scale") c.init_scale = Get<double>(v, k);
    else BadKey("train config", k);
  }
  return c;
}

Json ToJson(const UnlearnConfig& c) {
  Json j{{"delta_target", c.delta_target},
         {"max_epochs", c.max_epochs},
         {"learning_rate", nullptr},
         {"effective_learning_rate", c.effective_learning_rate()},
         {"seed", c.seed},
         {"check_every", c.check_every},
         {"method", MethodName(c.method)},
         {"method_params",
          {{"ssd_alpha", c.params.ssd_alpha},
           {"ssd_lambda", c.params.ssd_lambda},
           {"entangled_term", c.params.entangled_term},
           {"consistent_phase", c.params.consistent_phase}}},
         {"training", ToJson(c.training)}};
  if (c.learning_rate) j["learning_rate"] = *c.learning_rate;
  return j;
}

UnlearnConfig UnlearnConfigFromJson(const Json& j, UnlearnConfig c) {
  RequireObject(j, "unlearn config");
  for (const auto& [k, v] : j.items()) {
    if (k == "delta_target") c.delta_target = Get<double>(v, k);
    else if (k == "max_epochs") c.max_epochs = Get<int>(v, k);
    else if (k == "learning_rate") {
      if (v.is_null()) c.learning_rate.reset();
      else c.learning_rate = Get<double>(v, k);
    }
    // Derived; accepted so a written run_config.json reads back.
    else if (k == "effective_learning_rate") continue;
    else if (k == "seed") c.seed = Get<std::uint64_t>(v, k);
    else if (k == "check_every") c.check_every = Get<int>(v, k);
    else if (k == "method") c.method = ParseMethod(Get<std::string>(v, k));
    else if (k == "method_params") {
      RequireObject(v, "method_params");
      for (const auto& [pk, pv] : v.items()) {
        if (pk == "ssd_alpha") c.params.ssd_alpha = Get<double>(pv, pk);
        else if (pk == "ssd_lambda") c.params.ssd_lambda = Get<double>(pv, pk);
        else if (pk == "entangled_term") c.params.entangled_term = Get<bool>(pv, pk);
        else if (pk == "consistent_phase") c.params.consistent_phase = Get<bool>(pv, pk);
        else BadKey("method_params", pk);
      }
    } else if (k == "training") {
      c.training = TrainConfigFromJson(v, c.training);
    } else {
      BadKey("unlearn config", k);
    }
  }
  return c;
}

Json ToJson(const MetricsReport& r) {
  auto num = [](double v) -> Json { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"method", r.method},
              {"mrr_forget", r.mrr_forget},
              {"mrr_entangled", r.mrr_entangled},
              {"mrr_disjoint", r.mrr_disjoint},
              {"mrr_test", r.mrr_test},
              {"forget_excluded", r.forget_excluded},
              {"normalized_forget", num(r.normalized_forget)},
              {"normalized_epoch_duration", r.normalized_epoch_duration},
              {"total_unlearn_time", r.total_unlearn_time},
              {"epochs_run", r.epochs_run},
              {"stopped_early", r.stopped_early},
              {"edit_count", r.edit_count},
              {"delta_target", r.delta_target}};
}

MetricsReport MetricsReportFromJson(const Json& j) {
  RequireObject(j, "report");
  MetricsReport r;
  try {
    r.method = j.at("method").get<std::string>();
    r.mrr_forget = j.at("mrr_forget").get<double>();
    r.mrr_entangled = j.at("mrr_entangled").get<double>();
    r.mrr_disjoint = j.at("mrr_disjoint").get<double>();
    r.mrr_test = j.at("mrr_test").get<double>();
    r.forget_excluded = j.at("forget_excluded").get<std::size_t>();
    const auto& nf = j.at("normalized_forget");
    r.normalized_forget =
        nf.is_null() ? std::numeric_limits<double>::quiet_NaN() : nf.get<double>();
    r.normalized_epoch_duration = j.at("normalized_epoch_duration").get<double>();
    r.total_unlearn_time = j.at("total_unlearn_time").get<double>();
    r.epochs_run = j.at("epochs_run").get<int>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    r.edit_count = j.at("edit_count").get<std::size_t>();
    r.delta_target = j.at("delta_target").get<double>();
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
  return r;
}

MetricsReport Summarize(const UnlearnRun& run, const UnlearnConfig& cfg,
                        std::size_t forget_excluded,
                        const std::vector<double>& train_epoch_seconds,
                        std::optional<double> retrain_test_mrr) {
  MetricsReport r;
  r.method = MethodName(run.method);
  const EpochRecord& last = run.last();
  r.mrr_forget = last.mrr_forget;
  r.mrr_entangled = last.mrr_entangled;
  r.mrr_disjoint = last.mrr_disjoint;
  r.mrr_test = last.mrr_test;
  r.forget_excluded = forget_excluded;
  r.normalized_forget = retrain_test_mrr
                            ? NormalizedForget(last.mrr_forget, *retrain_test_mrr)
                            : std::numeric_limits<double>::quiet_NaN();
  const TimingMetrics t = ComputeTiming(train_epoch_seconds, run.epoch_seconds(), run.epochs_run);
  r.normalized_epoch_duration = t.normalized_epoch_duration;
  r.total_unlearn_time = t.total_unlearn_time;
  r.epochs_run = run.epochs_run;
  r.stopped_early = run.stopped_early;
  r.edit_count = run.edit_count;
  r.delta_target = cfg.delta_target;
  return r;
}

namespace {

std::vector<std::vector<std::string>> ParseCsv(const std::string& text,
                                               const std::string& expected_header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != expected_header) {
    Fail(ErrorCode::kParse, "expected CSV header '" + expected_header + "'");
  }
  const auto width = std::count(expected_header.begin(), expected_header.end(), ',') + 1;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (static_cast<long>(cells.size()) != width) {
      Fail(ErrorCode::kParse, "CSV row has " + std::to_string(cells.size()) + " fields: " + line);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

double ToDouble(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorCode::kParse, "not a number: '" + s + "'");
  }
}

int ToInt(const std::string& s) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    Fail(ErrorCode::kParse, "not an integer: '" + s + "'");
  }
}

constexpr const char* kTrainHeader = "epoch,loss,train_mrr,wall_time_s";
constexpr const char* kTrajectoryHeader =
    "epoch,mrr_forget,mrr_entangled,mrr_disjoint,mrr_test,wall_time_s";

}  // namespace

std::string TrainTrajectoryCsv(const std::vector<TrainEpoch>& rows) {
  std::string out = std::string(kTrainHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + FormatNumber(r.loss) + "," +
           FormatNumber(r.train_mrr) + "," + FormatNumber(r.wall_time_s) + "\n";
  }
  return out;
}

std::vector<TrainEpoch> ParseTrainTrajectoryCsv(const std::string& text) {
  std::vector<TrainEpoch> out;
  for (const auto& c : ParseCsv(text, kTrainHeader)) {
    out.push_back({ToInt(c[0]), ToDouble(c[1]), ToDouble(c[2]), ToDouble(c[3])});
  }
  return out;
}

std::string TrajectoryCsv(const std::vector<EpochRecord>& rows) {
  std::string out = std::string(kTrajectoryHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + FormatNumber(r.mrr_forget) + "," +
           FormatNumber(r.mrr_entangled) + "," + FormatNumber(r.mrr_disjoint) + "," +
           FormatNumber(r.mrr_test) + "," + FormatNumber(r.wall_time_s) + "\n";
  }
  return out;
}

std::vector<EpochRecord> ParseTrajectoryCsv(const std::string& text) {
  std::vector<EpochRecord> out;
  for (const auto& c : ParseCsv(text, kTrajectoryHeader)) {
    out.push_back({ToInt(c[0]), ToDouble(c[1]), ToDouble(c[2]), ToDouble(c[3]),
                   ToDouble(c[4]), ToDouble(c[5])});
  }
  return out;
}

std::string ReportCsv(const std::vector<MetricsReport>& rows) {
  std::string out =
      "method,F,E,D,T,normalized_forget,normalized_epoch_duration,total_unlearn_time,"
      "epochs_run,stopped_early,edit_count,delta_target,forget_excluded\n";
  for (const auto& r : rows) {
    out += r.method + "," + FormatNumber(r.mrr_forget) + "," + FormatNumber(r.mrr_entangled) +
           "," + FormatNumber(r.mrr_disjoint) + "," + FormatNumber(r.mrr_test) + "," +
           FormatNumber(r.normalized_forget) + "," + FormatNumber(r.normalized_epoch_duration) +
           "," + FormatNumber(r.total_unlearn_time) + "," + std::to_string(r.epochs_run) + "," +
           (r.stopped_early ? "true" : "false") + "," + std::to_string(r.edit_count) + "," +
           FormatNumber(r.delta_target) + "," + std::to_string(r.forget_excluded) + "\n";
  }
  return out;
}

std::string DistributionsCsv(const std::vector<ScoreDistribution>& rows) {
  std::string out = "model,set,count,min,max,mean,spread";
  for (int i = 1; i <= 9; ++i) out += ",p" + std::to_string(i * 10);
  out += "\n";
  for (const auto& r : rows) {
    out += r.model + "," + r.set + "," + std::to_string(r.count) + "," + FormatNumber(r.min) +
           "," + FormatNumber(r.max) + "," + FormatNumber(r.mean) + "," +
           FormatNumber(r.spread());
    for (double q : r.deciles) out += "," + FormatNumber(q);
    out += "\n";
  }
  return out;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<LineSeries>& series) {
  constexpr double kW = 720, kH = 420, kLeft = 60, kRight = 170, kTop = 40, kBottom = 50;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = 0.0, y_max = 1.0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) Fail(ErrorCode::kInvalidArgument, "series x/y size mismatch");
    for (double x : s.x) x_min = std::min(x_min, x), x_max = std::max(x_max, x);
    for (double y : s.y) {
      if (std::isfinite(y)) y_min = std::min(y_min, y), y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0;
  if (x_max == x_min) x_max = x_min + 1.0;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << Escape(title) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_min + (y_max - y_min) * i / 4.0;
    o << "<line x1=\"" << kLeft << "\" y1=\"" << Fixed(py(y)) << "\" x2=\"" << kLeft + pw
      << "\" y2=\"" << Fixed(py(y)) << "\" stroke=\"#dddddd\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << Fixed(py(y) + 4)
      << "\" text-anchor=\"end\" font-size=\"11\">" << Fixed(y) << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 4.0;
    o << "<text x=\"" << Fixed(px(x)) << "\" y=\"" << kTop + ph + 16
      << "\" text-anchor=\"middle\" font-size=\"11\">" << Fixed(x, 0) << "</text>\n";
  }
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw
    << "\" y2=\"" << kTop + ph << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
    << kTop + ph << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 12
    << "\" text-anchor=\"middle\" font-size=\"12\">" << Escape(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\""
    << " transform=\"rotate(-90 16 " << kTop + ph / 2 << ")\">" << Escape(y_label)
    << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kPalette[i % std::size(kPalette)];
    std::string points;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      if (!points.empty()) points += " ";
      points += Fixed(px(s.x[k])) + "," + Fixed(py(s.y[k]));
    }
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
      << points << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
    o << "<line x1=\"" << kW - kRight + 14 << "\" y1=\"" << ly << "\" x2=\""
      << kW - kRight + 34 << "\" y2=\"" << ly << "\" stroke=\"" << color
      << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << kW - kRight + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
      << Escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string RadarChartSvg(const std::string& title, const std::vector<std::string>& axes,
                          const std::vector<RadarSeries>& series) {
  if (axes.size() < 3) Fail(ErrorCode::kInvalidArgument, "radar chart needs at least 3 axes");
  constexpr double kW = 560, kH = 480, kCx = 230, kCy = 250, kR = 170;
  const double pi = std::acos(-1.0);
  auto angle = [&](std::size_t i) {
    return -pi / 2 + 2 * pi * static_cast<double>(i) / static_cast<double>(axes.size());
  };
  auto point = [&](std::size_t i, double r) {
    return Fixed(kCx + r * kR * std::cos(angle(i))) + "," +
           Fixed(kCy + r * kR * std::sin(angle(i)));
  };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << Escape(title) << "</text>\n";
  for (int ring = 1; ring <= 4; ++ring) {
    std::string pts;
    for (std::size_t i = 0; i < axes.size(); ++i) pts += (i ? " " : "") + point(i, ring / 4.0);
    o << "<polygon fill=\"none\" stroke=\"#dddddd\" points=\"" << pts << "\"/>\n";
  }
  for (std::size_t i = 0; i < axes.size(); ++i) {
    o << "<line x1=\"" << kCx << "\" y1=\"" << kCy << "\" x2=\""
      << Fixed(kCx + kR * std::cos(angle(i))) << "\" y2=\""
      << Fixed(kCy + kR * std::sin(angle(i))) << "\" stroke=\"#999999\"/>\n";
    o << "<text x=\"" << Fixed(kCx + (kR + 16) * std::cos(angle(i))) << "\" y=\""
      << Fixed(kCy + (kR + 16) * std::sin(angle(i)) + 4)
      << "\" text-anchor=\"middle\" font-size=\"12\">" << Escape(axes[i]) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    if (s.values.size() != axes.size()) {
      Fail(ErrorCode::kInvalidArgument, "radar series '" + s.name + "' has wrong arity");
    }
    const char* color = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const double v = std::isfinite(s.values[i]) ? std::clamp(s.values[i], 0.0, 1.0) : 0.0;
      pts += (i ? " " : "") + point(i, v);
    }
    o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.12\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    const double ly = 60 + 18.0 * static_cast<double>(k);
    o << "<rect x=\"" << kW - 110 << "\" y=\"" << ly - 8 << "\" width=\"12\" height=\"12\" fill=\""
      << color << "\"/>\n";
    o << "<text x=\"" << kW - 92 << "\" y=\"" << ly + 2 << "\" font-size=\"11\">"
      << Escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace numur
