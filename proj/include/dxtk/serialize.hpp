#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "dxtk/corpus.hpp"
#include "dxtk/eval.hpp"
#include "dxtk/grpo.hpp"
#include "dxtk/mcq.hpp"
#include "dxtk/reward.hpp"

namespace dxtk {

// JSON shapes are documented in docs/formats.md; every record carries
// format_version. Readers accept records without the field and reject other
// versions.

nlohmann::json to_json(const TaxonomyAnnotation& annotation);
TaxonomyAnnotation annotation_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DiagnosticCase& c);
DiagnosticCase case_from_json(const nlohmann::json& doc);
std::vector<DiagnosticCase> load_cases(const std::string& path);
void write_cases(const std::string& path, std::span<const DiagnosticCase> cases);

nlohmann::json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& doc);
std::vector<Trajectory> load_trajectories(const std::string& path);
void write_trajectories(const std::string& path, std::span<const Trajectory> trajectories);

nlohmann::json to_json(const SftRecord& record);
void write_sft_records(const std::string& path, std::span<const SftRecord> records);

nlohmann::json to_json(const McqItem& item);
McqItem item_from_json(const nlohmann::json& doc);
std::vector<McqItem> load_items(const std::string& path);
void write_items(const std::string& path, std::span<const McqItem> items);

nlohmann::json to_json(const PredictionRecord& pred);
PredictionRecord prediction_from_json(const nlohmann::json& doc);
std::vector<PredictionRecord> load_predictions(const std::string& path);

nlohmann::json to_json(const ParsedCompletion& parsed);
nlohmann::json to_json(const RewardBreakdown& breakdown);

nlohmann::json to_json(const EvalReport& report);
nlohmann::json to_json(const GrpoConfig& cfg);
nlohmann::json to_json(const TrainingReport& report);

}  // namespace dxtk
