#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dxtk/reward.hpp"
#include "dxtk/taxonomy.hpp"

namespace dxtk {

enum class McqVariant { standard, lesion_condition, hierarchical, ddx };
std::optional<McqVariant> parse_variant(std::string_view name);
std::string_view to_string(McqVariant v);

struct McqOption {
  char letter = 'A';
  std::string label;
  double gran_value = 0.0;  // gran_scale * depth/L when on the truth path
  bool pad = false;         // filler distractor in a targeted variant
};

struct McqItem {
  std::string id;
  std::string image_ref;
  std::string question;
  std::vector<McqOption> options;
  char correct_letter = 'A';
  TaxonomyAnnotation ground_truth;
  McqVariant variant = McqVariant::standard;

  const McqOption* option_for(char letter) const;
};

enum class QuestionTemplate { rl_training, disease_eval, lesion_condition };
std::optional<QuestionTemplate> parse_question_template(std::string_view name);

struct McqBuildConfig {
  int n_opts = 4;
  double p_local = 0.5;       // chance a distractor comes from the local pool
  double gran_scale = kDefaultGranScale;
  bool inject_ancestor = false;
  QuestionTemplate question_template = QuestionTemplate::rl_training;
  std::string question_stem;  // defaults to the standard abnormality stem

  void validate() const;
};

// Taxonomy-consistent option sampling: the ground-truth leaf plus distractors
// drawn from the local label pool with probability p_local, otherwise from
// the whole tree; on-path ancestors are permitted and the leaf stays the
// unique correct answer. Options are shuffled by the item seed.
McqItem build_mcq(const std::string& id, const std::string& image_ref,
                  std::string_view ground_truth_label,
                  std::span<const std::string> local_labels,
                  const TaxonomyTree& global_tree, const McqBuildConfig& cfg,
                  std::uint64_t seed);

// Same instance, options replaced by the fixed benign/malignant/precancerous
// triple; the correct letter follows the annotation's malignancy.
McqItem build_lesion_condition(const McqItem& item);

struct VariantResult {
  std::optional<McqItem> item;
  std::string skip_reason;  // set iff item is empty
};

// Distractors become strict ancestors of the ground truth, padded with
// off-path labels when the path is short. Items whose path has no ancestors
// are skipped.
VariantResult build_hierarchical_variant(const McqItem& item,
                                         const TaxonomyTree& global_tree,
                                         const McqBuildConfig& cfg, std::uint64_t seed);

// Distractors become DDX neighbors of the ground truth (falling back to the
// parent's neighborhood), padded with off-path labels.
McqItem build_ddx_variant(const McqItem& item, const DdxGraph& ddx,
                          const TaxonomyTree& global_tree, const McqBuildConfig& cfg,
                          std::uint64_t seed);

// "A: melanoma B: ..." inlined into the chosen template.
std::string render_question(std::span<const McqOption> options, QuestionTemplate tmpl,
                            std::string_view stem);

// Adapter for the reward module.
ScoreTarget score_target(const McqItem& item);

inline RewardBreakdown total_reward(std::string_view completion, const McqItem& item,
                                    const TagSet& tags, ParseMode mode,
                                    const RewardConfig& cfg = {}) {
  return total_reward(completion, score_target(item), tags, mode, cfg);
}

}  // namespace dxtk
