#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dxtk/mcq.hpp"
#include "dxtk/reward.hpp"

namespace dxtk {

struct PredictionRecord {
  std::string item_id;
  std::string raw_completion;
  std::string dataset_tag;
};

struct DatasetStats {
  std::size_t n = 0;
  std::size_t correct = 0;
  std::size_t invalid = 0;  // no letter extracted; counted as incorrect
  double accuracy = 0.0;
  std::optional<double> macro_f1;  // lesion-condition datasets only
  double invalid_rate = 0.0;
};

struct EvalReport {
  std::map<std::string, DatasetStats> per_dataset;
  // Unweighted means across datasets by default, mirroring the usual "Avg."
  // column; `weighted` switches to sample weighting.
  double avg_accuracy = 0.0;
  std::optional<double> avg_macro_f1;
  double avg_invalid_rate = 0.0;
  std::size_t total_n = 0;
  bool weighted = false;
};

using ItemIndex = std::map<std::string, McqItem>;
ItemIndex index_items(std::span<const McqItem> items);

// Letter-vs-correct-letter accuracy per dataset tag. Unextractable
// predictions count as incorrect and feed invalid_rate. Errors on an empty
// prediction list or an id missing from the index.
std::map<std::string, DatasetStats> accuracy(std::span<const PredictionRecord> preds,
                                             const ItemIndex& items, ParseMode mode,
                                             const TagSet& tags = TagSet::rl());

// Unweighted mean of per-class F1 over the fixed {A, B, C} classes. A class
// absent from both truth and prediction contributes 0 and still divides by 3.
// Every referenced item must be a lesion_condition item.
double macro_f1(std::span<const PredictionRecord> preds, const ItemIndex& items,
                ParseMode mode, const TagSet& tags = TagSet::rl());

EvalReport aggregate(std::map<std::string, DatasetStats> fragments,
                     bool weighted = false);

// accuracy + macro_f1 (for all-lesion datasets) + aggregate in one pass.
EvalReport evaluate(std::span<const PredictionRecord> preds, const ItemIndex& items,
                    ParseMode mode, const TagSet& tags = TagSet::rl(),
                    bool weighted = false);

// Fixed-width human-readable table.
std::string format_report(const EvalReport& report);

}  // namespace dxtk
