#include "dxtk/eval.hpp"

#include <array>
#include <iomanip>
#include <sstream>

#include "dxtk/errors.hpp"

namespace dxtk {

namespace {

const McqItem& item_for(const ItemIndex& items, const std::string& id) {
  const auto it = items.find(id);
  if (it == items.end()) throw DataError("prediction references unknown item id \"" + id + "\"");
  return it->second;
}

std::optional<char> extract_letter(const PredictionRecord& pred, const McqItem& item,
                                   ParseMode mode, const TagSet& tags) {
  const auto target = score_target(item);
  const auto parsed = parse_completion(pred.raw_completion, tags, mode, target.options);
  return parsed.option_letter;
}

}  // namespace

ItemIndex index_items(std::span<const McqItem> items) {
  ItemIndex out;
  for (const auto& item : items) {
    if (!out.emplace(item.id, item).second) {
      throw DataError("duplicate item id \"" + item.id + "\"");
    }
  }
  return out;
}

std::map<std::string, DatasetStats> accuracy(std::span<const PredictionRecord> preds,
                                             const ItemIndex& items, ParseMode mode,
                                             const TagSet& tags) {
  if (preds.empty()) throw DataError("empty prediction list");
  std::map<std::string, DatasetStats> out;
  for (const auto& pred : preds) {
    const McqItem& item = item_for(items, pred.item_id);
    DatasetStats& stats = out[pred.dataset_tag];
    ++stats.n;
    const auto letter = extract_letter(pred, item, mode, tags);
    if (!letter) {
      ++stats.invalid;
    } else if (*letter == item.correct_letter) {
      ++stats.correct;
    }
  }
  for (auto& [tag, stats] : out) {
    stats.accuracy = static_cast<double>(stats.correct) / static_cast<double>(stats.n);
    stats.invalid_rate =
        static_cast<double>(stats.invalid) / static_cast<double>(stats.n);
  }
  return out;
}

double macro_f1(std::span<const PredictionRecord> preds, const ItemIndex& items,
                ParseMode mode, const TagSet& tags) {
  if (preds.empty()) throw DataError("empty prediction list");
  static constexpr std::array<char, 3> kClasses{'A', 'B', 'C'};
  std::array<std::size_t, 3> tp{}, fp{}, fn{};

  for (const auto& pred : preds) {
    const McqItem& item = item_for(items, pred.item_id);
    if (item.variant != McqVariant::lesion_condition) {
      throw DataError("macro_f1 requires lesion_condition items; item \"" + item.id +
                      "\" is " + std::string(to_string(item.variant)));
    }
    const auto letter = extract_letter(pred, item, mode, tags);
    for (std::size_t c = 0; c < kClasses.size(); ++c) {
      const bool truth_is_c = item.correct_letter == kClasses[c];
      const bool pred_is_c = letter && *letter == kClasses[c];
      if (pred_is_c && truth_is_c) ++tp[c];
      if (pred_is_c && !truth_is_c) ++fp[c];
      if (!pred_is_c && truth_is_c) ++fn[c];
    }
  }

  double sum = 0.0;
  for (std::size_t c = 0; c < kClasses.size(); ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    sum += denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp[c]) / denom;
  }
  return sum / static_cast<double>(kClasses.size());
}

EvalReport aggregate(std::map<std::string, DatasetStats> fragments, bool weighted) {
  EvalReport report;
  report.weighted = weighted;
  report.per_dataset = std::move(fragments);
  if (report.per_dataset.empty()) return report;

  double acc_sum = 0.0, invalid_sum = 0.0, f1_sum = 0.0, weight_sum = 0.0;
  std::size_t f1_count = 0;
  double f1_weight_sum = 0.0;
  for (const auto& [tag, stats] : report.per_dataset) {
    const double w = weighted ? static_cast<double>(stats.n) : 1.0;
    acc_sum += w * stats.accuracy;
    invalid_sum += w * stats.invalid_rate;
    weight_sum += w;
    report.total_n += stats.n;
    if (stats.macro_f1) {
      f1_sum += w * *stats.macro_f1;
      f1_weight_sum += w;
      ++f1_count;
    }
  }
  report.avg_accuracy = acc_sum / weight_sum;
  report.avg_invalid_rate = invalid_sum / weight_sum;
  if (f1_count > 0) report.avg_macro_f1 = f1_sum / f1_weight_sum;
  return report;
}

EvalReport evaluate(std::span<const PredictionRecord> preds, const ItemIndex& items,
                    ParseMode mode, const TagSet& tags, bool weighted) {
  auto fragments = accuracy(preds, items, mode, tags);

  // Per-dataset macro-F1 wherever the dataset is entirely lesion items.
  std::map<std::string, std::vector<PredictionRecord>> by_tag;
  for (const auto& pred : preds) by_tag[pred.dataset_tag].push_back(pred);
  for (auto& [tag, subset] : by_tag) {
    bool all_lesion = true;
    for (const auto& pred : subset) {
      if (item_for(items, pred.item_id).variant != McqVariant::lesion_condition) {
        all_lesion = false;
        break;
      }
    }
    if (all_lesion) {
      fragments[tag].macro_f1 = macro_f1(subset, items, mode, tags);
    }
  }
  return aggregate(std::move(fragments), weighted);
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "dataset" << std::right << std::setw(8) << "n"
      << std::setw(10) << "acc" << std::setw(10) << "f1" << std::setw(10) << "invalid"
      << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& [tag, stats] : report.per_dataset) {
    out << std::left << std::setw(20) << tag << std::right << std::setw(8) << stats.n
        << std::setw(10) << stats.accuracy << std::setw(10);
    if (stats.macro_f1) {
      out << *stats.macro_f1;
    } else {
      out << "-";
    }
    out << std::setw(10) << stats.invalid_rate << '\n';
  }
  out << std::left << std::setw(20) << (report.weighted ? "Avg. (weighted)" : "Avg.")
      << std::right << std::setw(8) << report.total_n << std::setw(10)
      << report.avg_accuracy << std::setw(10);
  if (report.avg_macro_f1) {
    out << *report.avg_macro_f1;
  } else {
    out << "-";
  }
  out << std::setw(10) << report.avg_invalid_rate << '\n';
  return out.str();
}

}  // namespace dxtk
