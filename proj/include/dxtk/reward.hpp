#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dxtk/taxonomy.hpp"

namespace dxtk {

inline constexpr double kDefaultGranScale = 0.75;
inline constexpr double kMalignancyRewardValue = 0.25;

// The four tag literals a completion must carry.
struct TagSet {
  std::string open_think;
  std::string close_think;
  std::string open_answer;
  std::string close_answer;

  static TagSet sft();  // <thinking> ... <diagnosis> ...
  static TagSet rl();   // <thinking> ... <final diagnosis> ...
  static std::optional<TagSet> preset(std::string_view name);

  // Non-empty and pairwise distinct; throws DataError otherwise.
  void validate() const;
};

enum class ParseMode { strict, lenient };
std::optional<ParseMode> parse_mode(std::string_view name);
std::string_view to_string(ParseMode mode);

// One multiple-choice option as the parser sees it.
struct OptionRef {
  char letter = 'A';
  std::string label;
};

struct TagsPresent {
  bool open_think = false;
  bool close_think = false;
  bool open_answer = false;
  bool close_answer = false;

  bool all() const { return open_think && close_think && open_answer && close_answer; }
};

struct ParsedCompletion {
  std::optional<std::string> thinking;
  std::optional<std::string> answer_text;
  std::optional<char> option_letter;
  std::optional<std::string> predicted_label;  // canonical
  std::optional<Malignancy> predicted_malignancy;
  TagsPresent tags_present;
  // First-occurrence offsets, kept for the optional ordered format check.
  std::optional<std::size_t> open_think_pos, close_think_pos;
  std::optional<std::size_t> open_answer_pos, close_answer_pos;
};

// Extracts the structured pieces of a completion. Strict mode reads the
// option letter only from inside the answer tags (first standalone letter
// token, or an exact option-label answer); lenient mode falls back to the
// full body, where the last letter mention wins but anything inside the
// answer tags still outranks the body. The malignancy keyword scan obeys the
// same scope rules and ignores "malignant" preceded by "non-".
ParsedCompletion parse_completion(std::string_view text, const TagSet& tags,
                                  ParseMode mode,
                                  std::span<const OptionRef> options = {});

enum class FormatCheck { presence, ordered };
std::optional<FormatCheck> parse_format_check(std::string_view name);

// 1 iff all four tags occur in the completion. The default check is
// presence-only; `ordered` additionally requires think-open < think-close <
// answer-open < answer-close by first occurrence.
double format_reward(const ParsedCompletion& parsed,
                     FormatCheck check = FormatCheck::presence);

// scale * depth/L for a prediction on the ground-truth path, 0 otherwise.
double gran_reward(const std::optional<std::string>& predicted_label,
                   const TaxonomyAnnotation& truth,
                   double scale = kDefaultGranScale);

// 0.25 iff the predicted category equals the truth; absent predictions score 0.
double malignancy_reward(const std::optional<Malignancy>& predicted, Malignancy truth);

// The label a completion predicts: the option named by the extracted letter
// first, then an exact option-label answer, then the deepest ground-truth
// path label mentioned in the answer text.
std::optional<std::string> resolve_predicted_label(const ParsedCompletion& parsed,
                                                   std::span<const OptionRef> options,
                                                   const TaxonomyAnnotation& truth);

struct RewardConfig {
  double gran_scale = kDefaultGranScale;
  FormatCheck format_check = FormatCheck::presence;
};

struct RewardBreakdown {
  double format = 0;
  double gran = 0;
  double malignancy = 0;
  double total = 0;
  ParsedCompletion parsed;
};

// Ground truth plus optional option list for scoring one completion.
struct ScoreTarget {
  TaxonomyAnnotation truth;
  std::vector<OptionRef> options;
};

// One parse, three sub-rewards, exact sum. Pure: identical inputs produce an
// identical breakdown.
RewardBreakdown total_reward(std::string_view completion, const ScoreTarget& target,
                             const TagSet& tags, ParseMode mode,
                             const RewardConfig& cfg = {});

}  // namespace dxtk
