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


#ifndef NUMUR_REPORT_HPP_
#define NUMUR_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "numur/corpus.hpp"
#include "numur/eval.hpp"
#include "numur/ranker.hpp"
#include "numur/unlearn.hpp"

namespace numur {

using Json = nlohmann::ordered_json;

// Writes `content` verbatim, creating parent directories. Throws kIo.
void WriteTextFile(const std::filesystem::path& path, const std::string& content);
std::string ReadTextFile(const std::filesystem::path& path);
Json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const Json& j);

// Fixed-width decimal form used in every CSV so reruns are byte-stable.
// Non-finite values become an empty field.
std::string FormatNumber(double v);

// Configuration round trips. FromJson overlays present keys on `base` and
// rejects unknown keys.
Json ToJson(const SyntheticConfig& c);
Json ToJson(const TrainConfig& c);
Json ToJson(const UnlearnConfig& c);
SyntheticConfig SyntheticConfigFromJson(const Json& j, SyntheticConfig base = {});
TrainConfig TrainConfigFromJson(const Json& j, TrainConfig base = {});
UnlearnConfig UnlearnConfigFromJson(const Json& j, UnlearnConfig base = {});

// normalized_forget is NaN (null in JSON) when no retrain MRR is known.
Json ToJson(const MetricsReport& r);
MetricsReport MetricsReportFromJson(const Json& j);

MetricsReport Summarize(const UnlearnRun& run, const UnlearnConfig& cfg,
                        std::size_t forget_excluded,
                        const std::vector<double>& train_epoch_seconds,
                        std::optional<double> retrain_test_mrr);

std::string TrainTrajectoryCsv(const std::vector<TrainEpoch>& rows);
std::vector<TrainEpoch> ParseTrainTrajectoryCsv(const std::string& text);
std::string TrajectoryCsv(const std::vector<EpochRecord>& rows);
std::vector<EpochRecord> ParseTrajectoryCsv(const std::string& text);
// Columns F, E, D, T in the conventional result-table order.
std::string ReportCsv(const std::vector<MetricsReport>& rows);
std::string DistributionsCsv(const std::vector<ScoreDistribution>& rows);

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<LineSeries>& series);

struct RadarSeries {
  std::string name;
  // One value in [0, 1] per axis; values outside are clamped for drawing.
  std::vector<double> values;
};

std::string RadarChartSvg(const std::string& title, const std::vector<std::string>& axes,
                          const std::vector<RadarSeries>& series);

}  // namespace numur

#endif  // NUMUR_REPORT_HPP_
