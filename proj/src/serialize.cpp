#include "dxtk/serialize.hpp"

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"
#include "dxtk/jsonl.hpp"
#include "dxtk/version.hpp"

namespace dxtk {

namespace {

using nlohmann::json;

void check_record_version(const json& doc, std::size_t lineno, const std::string& path) {
  if (!doc.contains("format_version")) return;
  if (!doc["format_version"].is_number_integer() ||
      doc["format_version"].get<int>() != kFormatVersion) {
    throw DataError(path + ":" + std::to_string(lineno) +
                    ": unsupported format_version");
  }
}

std::string require_string(const json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_string()) {
    throw DataError(std::string("missing string field \"") + field + "\"");
  }
  return doc[field].get<std::string>();
}

std::optional<std::string> optional_string(const json& doc, const char* field) {
  if (!doc.contains(field) || doc[field].is_null()) return std::nullopt;
  if (!doc[field].is_string()) {
    throw DataError(std::string("field \"") + field + "\" must be a string");
  }
  return doc[field].get<std::string>();
}

Malignancy require_malignancy(const json& doc, const char* field) {
  const auto value = parse_malignancy(require_string(doc, field));
  if (!value) {
    throw DataError(std::string("invalid malignancy in field \"") + field + "\"");
  }
  return *value;
}

char require_letter(const json& doc, const char* field) {
  const std::string raw = require_string(doc, field);
  if (raw.size() != 1 || raw[0] < 'A' || raw[0] > 'Z') {
    throw DataError(std::string("field \"") + field + "\" must be a single letter A-Z");
  }
  return raw[0];
}

template <typename T, typename Reader>
std::vector<T> load_records(const std::string& path, Reader reader) {
  std::vector<T> out;
  read_jsonl(path, [&](json&& doc, std::size_t lineno) {
    check_record_version(doc, lineno, path);
    try {
      out.push_back(reader(doc));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

template <typename T>
void write_records(const std::string& path, std::span<const T> records) {
  JsonlWriter writer(path);
  for (const auto& record : records) writer.write(to_json(record));
}

}  // namespace

json to_json(const TaxonomyAnnotation& annotation) {
  return {{"path", annotation.path},
          {"malignancy", std::string(to_string(annotation.malignancy))}};
}

TaxonomyAnnotation annotation_from_json(const json& doc) {
  if (!doc.contains("path") || !doc["path"].is_array() || doc["path"].empty()) {
    throw DataError("annotation: path must be a non-empty label array");
  }
  TaxonomyAnnotation annotation;
  for (const auto& label : doc["path"]) {
    if (!label.is_string()) throw DataError("annotation: path labels must be strings");
    annotation.path.push_back(canonical_label(label.get<std::string>()));
  }
  annotation.malignancy = require_malignancy(doc, "malignancy");
  return annotation;
}

json to_json(const DiagnosticCase& c) {
  return {{"format_version", kFormatVersion},
          {"id", c.id},
          {"image_ref", c.image_ref},
          {"rationale", c.rationale},
          {"diagnosis", c.diagnosis}};
}

DiagnosticCase case_from_json(const json& doc) {
  DiagnosticCase c;
  c.id = require_string(doc, "id");
  c.image_ref = require_string(doc, "image_ref");
  c.rationale = require_string(doc, "rationale");
  c.diagnosis = require_string(doc, "diagnosis");
  if (c.rationale.empty()) throw DataError("case \"" + c.id + "\": empty rationale");
  return c;
}

std::vector<DiagnosticCase> load_cases(const std::string& path) {
  return load_records<DiagnosticCase>(path, case_from_json);
}

void write_cases(const std::string& path, std::span<const DiagnosticCase> cases) {
  write_records(path, cases);
}

json to_json(const Trajectory& trajectory) {
  json doc{{"format_version", kFormatVersion},
           {"id", trajectory.id},
           {"kind", std::string(to_string(trajectory.kind))},
           {"image_ref", trajectory.image_ref},
           {"primary_rationale", trajectory.primary_rationale},
           {"primary_diagnosis", trajectory.primary_diagnosis},
           {"final_diagnosis", trajectory.final_diagnosis},
           {"annotation", to_json(trajectory.annotation)}};
  if (trajectory.differential_rationale) {
    doc["differential_rationale"] = *trajectory.differential_rationale;
  }
  if (trajectory.differential_diagnosis) {
    doc["differential_diagnosis"] = *trajectory.differential_diagnosis;
  }
  if (trajectory.comparison) doc["comparison"] = *trajectory.comparison;
  return doc;
}

Trajectory trajectory_from_json(const json& doc) {
  Trajectory trajectory;
  trajectory.id = require_string(doc, "id");
  const auto kind = parse_trajectory_kind(require_string(doc, "kind"));
  if (!kind) throw DataError("trajectory \"" + trajectory.id + "\": invalid kind");
  trajectory.kind = *kind;
  trajectory.image_ref = require_string(doc, "image_ref");
  trajectory.primary_rationale = require_string(doc, "primary_rationale");
  trajectory.primary_diagnosis = canonical_label(require_string(doc, "primary_diagnosis"));
  trajectory.differential_rationale = optional_string(doc, "differential_rationale");
  if (const auto d = optional_string(doc, "differential_diagnosis")) {
    trajectory.differential_diagnosis = canonical_label(*d);
  }
  trajectory.comparison = optional_string(doc, "comparison");
  trajectory.final_diagnosis = canonical_label(require_string(doc, "final_diagnosis"));
  if (!doc.contains("annotation")) {
    throw DataError("trajectory \"" + trajectory.id + "\": missing annotation");
  }
  trajectory.annotation = annotation_from_json(doc["annotation"]);
  return trajectory;
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  return load_records<Trajectory>(path, trajectory_from_json);
}

void write_trajectories(const std::string& path,
                        std::span<const Trajectory> trajectories) {
  write_records(path, trajectories);
}

json to_json(const SftRecord& record) {
  return {{"format_version", kFormatVersion},
          {"image_ref", record.image_ref},
          {"prompt", record.prompt},
          {"response", record.response}};
}

void write_sft_records(const std::string& path, std::span<const SftRecord> records) {
  write_records(path, records);
}

json to_json(const McqItem& item) {
  json options = json::array();
  for (const auto& opt : item.options) {
    options.push_back({{"letter", std::string(1, opt.letter)},
                       {"label", opt.label},
                       {"gran_value", opt.gran_value},
                       {"pad", opt.pad}});
  }
  return {{"format_version", kFormatVersion},
          {"id", item.id},
          {"image_ref", item.image_ref},
          {"question", item.question},
          {"options", std::move(options)},
          {"correct_letter", std::string(1, item.correct_letter)},
          {"ground_truth", to_json(item.ground_truth)},
          {"variant", std::string(to_string(item.variant))}};
}

McqItem item_from_json(const json& doc) {
  McqItem item;
  item.id = require_string(doc, "id");
  item.image_ref = require_string(doc, "image_ref");
  item.question = require_string(doc, "question");
  if (!doc.contains("options") || !doc["options"].is_array()) {
    throw DataError("item \"" + item.id + "\": missing options array");
  }
  for (const auto& opt_doc : doc["options"]) {
    McqOption opt;
    opt.letter = require_letter(opt_doc, "letter");
    opt.label = require_string(opt_doc, "label");
    if (!opt_doc.contains("gran_value") || !opt_doc["gran_value"].is_number()) {
      throw DataError("item \"" + item.id + "\": option missing gran_value");
    }
    opt.gran_value = opt_doc["gran_value"].get<double>();
    opt.pad = opt_doc.value("pad", false);
    item.options.push_back(std::move(opt));
  }
  item.correct_letter = require_letter(doc, "correct_letter");
  if (!doc.contains("ground_truth")) {
    throw DataError("item \"" + item.id + "\": missing ground_truth");
  }
  item.ground_truth = annotation_from_json(doc["ground_truth"]);
  const auto variant = parse_variant(require_string(doc, "variant"));
  if (!variant) throw DataError("item \"" + item.id + "\": invalid variant");
  item.variant = *variant;
  return item;
}

std::vector<McqItem> load_items(const std::string& path) {
  return load_records<McqItem>(path, item_from_json);
}

void write_items(const std::string& path, std::span<const McqItem> items) {
  write_records(path, items);
}

json to_json(const PredictionRecord& pred) {
  return {{"format_version", kFormatVersion},
          {"item_id", pred.item_id},
          {"raw_completion", pred.raw_completion},
          {"dataset_tag", pred.dataset_tag}};
}

PredictionRecord prediction_from_json(const json& doc) {
  PredictionRecord pred;
  pred.item_id = require_string(doc, "item_id");
  pred.raw_completion = require_string(doc, "raw_completion");
  pred.dataset_tag = require_string(doc, "dataset_tag");
  return pred;
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  return load_records<PredictionRecord>(path, prediction_from_json);
}

json to_json(const ParsedCompletion& parsed) {
  json doc{{"tags_present",
            {{"open_think", parsed.tags_present.open_think},
             {"close_think", parsed.tags_present.close_think},
             {"open_answer", parsed.tags_present.open_answer},
             {"close_answer", parsed.tags_present.close_answer}}}};
  if (parsed.thinking) doc["thinking"] = *parsed.thinking;
  if (parsed.answer_text) doc["answer_text"] = *parsed.answer_text;
  if (parsed.option_letter) doc["option_letter"] = std::string(1, *parsed.option_letter);
  if (parsed.predicted_label) doc["predicted_label"] = *parsed.predicted_label;
  if (parsed.predicted_malignancy) {
    doc["predicted_malignancy"] = std::string(to_string(*parsed.predicted_malignancy));
  }
  return doc;
}

json to_json(const RewardBreakdown& breakdown) {
  return {{"format_version", kFormatVersion},
          {"format", breakdown.format},
          {"gran", breakdown.gran},
          {"malignancy", breakdown.malignancy},
          {"total", breakdown.total},
          {"parsed", to_json(breakdown.parsed)}};
}

json to_json(const EvalReport& report) {
  json datasets = json::object();
  for (const auto& [tag, stats] : report.per_dataset) {
    json row{{"n", stats.n},
             {"accuracy", stats.accuracy},
             {"invalid_rate", stats.invalid_rate}};
    if (stats.macro_f1) row["macro_f1"] = *stats.macro_f1;
    datasets[tag] = std::move(row);
  }
  json doc{{"format_version", kFormatVersion},
           {"per_dataset", std::move(datasets)},
           {"avg_accuracy", report.avg_accuracy},
           {"avg_invalid_rate", report.avg_invalid_rate},
           {"total_n", report.total_n},
           {"weighted", report.weighted}};
  if (report.avg_macro_f1) doc["avg_macro_f1"] = *report.avg_macro_f1;
  return doc;
}

json to_json(const GrpoConfig& cfg) {
  return {{"group_size", cfg.group_size},
          {"clip_epsilon", cfg.clip_epsilon},
          {"kl_coeff", cfg.kl_coeff},
          {"temperature", cfg.temperature},
          {"learning_rate", cfg.learning_rate},
          {"steps", cfg.steps},
          {"seed", cfg.seed},
          {"batch_size", cfg.batch_size},
          {"format_corruption_prob", cfg.format_corruption_prob}};
}

json to_json(const TrainingReport& report) {
  json steps = json::array();
  for (const auto& s : report.steps) {
    steps.push_back({{"step", s.step},
                     {"mean_reward", s.mean_reward},
                     {"mean_format", s.mean_format},
                     {"mean_gran", s.mean_gran},
                     {"mean_malignancy", s.mean_malignancy},
                     {"mean_kl", s.mean_kl},
                     {"greedy_accuracy", s.greedy_accuracy}});
  }
  return {{"format_version", kFormatVersion},
          {"config", to_json(report.config)},
          {"steps", std::move(steps)},
          {"initial_greedy_accuracy", report.initial_greedy_accuracy},
          {"final_greedy_accuracy", report.final_greedy_accuracy},
          {"final_mean_kl", report.final_mean_kl}};
}

}  // namespace dxtk
