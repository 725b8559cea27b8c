#include "dxtk/reward.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"

namespace dxtk {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return std::string(text.substr(begin, end - begin));
}

std::optional<std::size_t> find_first(std::string_view text, std::string_view needle) {
  const auto pos = text.find(needle);
  if (pos == std::string_view::npos) return std::nullopt;
  return pos;
}

// Inner text between the first `open` and the next `close` after it.
std::optional<std::string> extract_block(std::string_view text, std::string_view open,
                                         std::string_view close) {
  const auto open_pos = text.find(open);
  if (open_pos == std::string_view::npos) return std::nullopt;
  const auto body_start = open_pos + open.size();
  const auto close_pos = text.find(close, body_start);
  if (close_pos == std::string_view::npos) return std::nullopt;
  return trim(text.substr(body_start, close_pos - body_start));
}

// A standalone uppercase letter: non-word char (or boundary) on the left,
// and one of {':', '.', ',', ')', whitespace, end} on the right.
bool letter_at(std::string_view text, std::size_t i, std::string_view valid) {
  const char c = text[i];
  if (c < 'A' || c > 'Z') return false;
  if (!valid.empty() && valid.find(c) == std::string_view::npos) return false;
  if (i > 0 && is_word_char(text[i - 1])) return false;
  if (i + 1 == text.size()) return true;
  const char next = text[i + 1];
  return next == ':' || next == '.' || next == ',' || next == ')' ||
         std::isspace(static_cast<unsigned char>(next));
}

std::optional<char> first_letter_token(std::string_view text, std::string_view valid) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (letter_at(text, i, valid)) return text[i];
  }
  return std::nullopt;
}

std::optional<char> last_letter_token(std::string_view text, std::string_view valid) {
  for (std::size_t i = text.size(); i > 0; --i) {
    if (letter_at(text, i - 1, valid)) return text[i - 1];
  }
  return std::nullopt;
}

// Last keyword mention in canonicalized text. "malignant" preceded by "non-"
// does not count.
std::optional<Malignancy> scan_malignancy(std::string_view raw) {
  const std::string text = canonical_label(raw);
  struct Keyword {
    std::string_view word;
    Malignancy value;
  };
  static constexpr std::array<Keyword, 3> kKeywords{{
      {"precancerous in situ", Malignancy::precancerous_in_situ},
      {"malignant", Malignancy::malignant},
      {"benign", Malignancy::benign},
  }};

  std::optional<Malignancy> best;
  std::size_t best_pos = 0;
  for (const auto& kw : kKeywords) {
    std::size_t from = 0;
    while (true) {
      const auto pos = text.find(kw.word, from);
      if (pos == std::string::npos) break;
      from = pos + 1;
      if (pos > 0 && is_word_char(text[pos - 1])) continue;
      const auto end = pos + kw.word.size();
      if (end < text.size() && is_word_char(text[end])) continue;
      if (kw.value == Malignancy::malignant && pos >= 4 &&
          text.compare(pos - 4, 4, "non-") == 0) {
        continue;
      }
      if (!best || pos >= best_pos) {
        best = kw.value;
        best_pos = pos;
      }
    }
  }
  return best;
}

std::string valid_letters(std::span<const OptionRef> options) {
  std::string out;
  for (const auto& opt : options) out.push_back(opt.letter);
  return out;
}

// Whole-word (boundary-checked) substring search over canonical text.
bool contains_label(std::string_view canonical_text, std::string_view canonical_needle) {
  if (canonical_needle.empty()) return false;
  std::size_t from = 0;
  while (true) {
    const auto pos = canonical_text.find(canonical_needle, from);
    if (pos == std::string_view::npos) return false;
    from = pos + 1;
    if (pos > 0 && is_word_char(canonical_text[pos - 1])) continue;
    const auto end = pos + canonical_needle.size();
    if (end < canonical_text.size() && is_word_char(canonical_text[end])) continue;
    return true;
  }
}

std::string strip_trailing_punct(std::string text) {
  while (!text.empty() && (text.back() == '.' || text.back() == ',')) {
    text.pop_back();
  }
  return trim(text);
}

}  // namespace

TagSet TagSet::sft() {
  return {"<thinking>", "</thinking>", "<diagnosis>", "</diagnosis>"};
}

TagSet TagSet::rl() {
  return {"<thinking>", "</thinking>", "<final diagnosis>", "</final diagnosis>"};
}

std::optional<TagSet> TagSet::preset(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "sft") return sft();
  if (c == "rl") return rl();
  return std::nullopt;
}

void TagSet::validate() const {
  const std::array<const std::string*, 4> tags{&open_think, &close_think, &open_answer,
                                               &close_answer};
  for (const auto* tag : tags) {
    if (tag->empty()) throw DataError("tag set: empty tag literal");
  }
  for (std::size_t i = 0; i < tags.size(); ++i) {
    for (std::size_t j = i + 1; j < tags.size(); ++j) {
      if (*tags[i] == *tags[j]) {
        throw DataError("tag set: duplicate tag literal \"" + *tags[i] + "\"");
      }
    }
  }
}

std::optional<ParseMode> parse_mode(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "strict") return ParseMode::strict;
  if (c == "lenient") return ParseMode::lenient;
  return std::nullopt;
}

std::string_view to_string(ParseMode mode) {
  return mode == ParseMode::strict ? "strict" : "lenient";
}

std::optional<FormatCheck> parse_format_check(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "presence") return FormatCheck::presence;
  if (c == "ordered") return FormatCheck::ordered;
  return std::nullopt;
}

ParsedCompletion parse_completion(std::string_view text, const TagSet& tags,
                                  ParseMode mode, std::span<const OptionRef> options) {
  ParsedCompletion out;
  out.open_think_pos = find_first(text, tags.open_think);
  out.close_think_pos = find_first(text, tags.close_think);
  out.open_answer_pos = find_first(text, tags.open_answer);
  out.close_answer_pos = find_first(text, tags.close_answer);
  out.tags_present = {out.open_think_pos.has_value(), out.close_think_pos.has_value(),
                      out.open_answer_pos.has_value(), out.close_answer_pos.has_value()};

  out.thinking = extract_block(text, tags.open_think, tags.close_think);
  out.answer_text = extract_block(text, tags.open_answer, tags.close_answer);

  const std::string letters = valid_letters(options);
  if (mode == ParseMode::strict) {
    if (out.answer_text) out.option_letter = first_letter_token(*out.answer_text, letters);
  } else {
    if (out.answer_text) out.option_letter = last_letter_token(*out.answer_text, letters);
    if (!out.option_letter) out.option_letter = last_letter_token(text, letters);
  }

  if (out.option_letter && !options.empty()) {
    for (const auto& opt : options) {
      if (opt.letter == *out.option_letter) {
        out.predicted_label = canonical_label(opt.label);
        break;
      }
    }
  }
  if (!out.option_letter && out.answer_text && !options.empty()) {
    const std::string answer = canonical_label(strip_trailing_punct(*out.answer_text));
    for (const auto& opt : options) {
      if (canonical_label(opt.label) == answer) {
        out.option_letter = opt.letter;
        out.predicted_label = answer;
        break;
      }
    }
  }

  if (out.answer_text) out.predicted_malignancy = scan_malignancy(*out.answer_text);
  if (!out.predicted_malignancy && mode == ParseMode::lenient) {
    out.predicted_malignancy = scan_malignancy(text);
  }
  return out;
}

double format_reward(const ParsedCompletion& parsed, FormatCheck check) {
  if (!parsed.tags_present.all()) return 0.0;
  if (check == FormatCheck::ordered) {
    const bool ordered = *parsed.open_think_pos < *parsed.close_think_pos &&
                         *parsed.close_think_pos < *parsed.open_answer_pos &&
                         *parsed.open_answer_pos < *parsed.close_answer_pos;
    if (!ordered) return 0.0;
  }
  return 1.0;
}

double gran_reward(const std::optional<std::string>& predicted_label,
                   const TaxonomyAnnotation& truth, double scale) {
  if (truth.path.empty()) throw DataError("gran_reward: empty ground-truth path");
  if (!predicted_label) return 0.0;
  const std::size_t depth = truth.depth_of(*predicted_label);
  if (depth == 0) return 0.0;
  return scale * depth_weight(truth.length(), depth);
}

double malignancy_reward(const std::optional<Malignancy>& predicted, Malignancy truth) {
  return (predicted && *predicted == truth) ? kMalignancyRewardValue : 0.0;
}

std::optional<std::string> resolve_predicted_label(const ParsedCompletion& parsed,
                                                   std::span<const OptionRef> options,
                                                   const TaxonomyAnnotation& truth) {
  if (parsed.predicted_label) return parsed.predicted_label;
  if (parsed.option_letter) {
    for (const auto& opt : options) {
      if (opt.letter == *parsed.option_letter) return canonical_label(opt.label);
    }
  }
  if (!parsed.answer_text) return std::nullopt;
  // Free-text completions name the diagnosis directly; take the deepest
  // ground-truth path label the answer mentions.
  const std::string answer = canonical_label(*parsed.answer_text);
  std::optional<std::string> best;
  for (std::size_t i = truth.path.size(); i > 0; --i) {
    if (contains_label(answer, truth.path[i - 1])) {
      best = truth.path[i - 1];
      break;
    }
  }
  return best;
}

RewardBreakdown total_reward(std::string_view completion, const ScoreTarget& target,
                             const TagSet& tags, ParseMode mode,
                             const RewardConfig& cfg) {
  RewardBreakdown out;
  out.parsed = parse_completion(completion, tags, mode, target.options);
  out.parsed.predicted_label =
      resolve_predicted_label(out.parsed, target.options, target.truth);
  if (!out.parsed.predicted_malignancy && out.parsed.predicted_label) {
    // Lesion-condition items answer with a letter whose option label is a
    // category name; treat that as the malignancy prediction.
    if (const auto m = parse_malignancy(*out.parsed.predicted_label)) {
      out.parsed.predicted_malignancy = m;
    }
  }
  out.format = format_reward(out.parsed, cfg.format_check);
  out.gran = gran_reward(out.parsed.predicted_label, target.truth, cfg.gran_scale);
  out.malignancy = malignancy_reward(out.parsed.predicted_malignancy,
                                     target.truth.malignancy);
  out.total = out.format + out.gran + out.malignancy;
  return out;
}

}  // namespace dxtk
