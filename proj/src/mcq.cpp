#include "dxtk/mcq.hpp"

#include <algorithm>
#include <set>

#include "dxtk/canonical.hpp"
#include "dxtk/errors.hpp"
#include "dxtk/prompts.hpp"
#include "dxtk/rng.hpp"

namespace dxtk {

namespace {

struct OptionDraft {
  std::string label;
  bool pad = false;
};

// Letters, shuffle, gran values, question text; shared tail of every builder.
McqItem finalize_item(McqItem item, std::vector<OptionDraft> drafts,
                      const McqBuildConfig& cfg, Rng& rng) {
  rng.shuffle(drafts);
  item.options.clear();
  item.options.reserve(drafts.size());
  const auto path_len = item.ground_truth.length();
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    McqOption opt;
    opt.letter = static_cast<char>('A' + i);
    opt.label = drafts[i].label;
    opt.pad = drafts[i].pad;
    const auto depth = item.ground_truth.depth_of(opt.label);
    opt.gran_value = depth == 0 ? 0.0 : cfg.gran_scale * depth_weight(path_len, depth);
    if (opt.label == item.ground_truth.leaf()) item.correct_letter = opt.letter;
    item.options.push_back(std::move(opt));
  }
  const std::string_view stem =
      cfg.question_stem.empty() ? prompts::kDefaultQuestionStem : cfg.question_stem;
  item.question = render_question(item.options, cfg.question_template, stem);
  return item;
}

// Removes `label` from a sorted pool; returns whether it was present.
bool erase_label(std::vector<std::string>& pool, const std::string& label) {
  const auto it = std::lower_bound(pool.begin(), pool.end(), label);
  if (it == pool.end() || *it != label) return false;
  pool.erase(it);
  return true;
}

std::string draw_label(std::vector<std::string>& pool, Rng& rng) {
  const auto idx = rng.uniform_index(pool.size());
  std::string label = pool[idx];
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
  return label;
}

std::vector<std::string> off_path_pool(const TaxonomyTree& tree,
                                       const TaxonomyAnnotation& truth,
                                       const std::set<std::string>& taken) {
  std::vector<std::string> pool;
  for (const auto& label : tree.labels()) {
    if (truth.depth_of(label) != 0) continue;
    if (taken.count(label)) continue;
    pool.push_back(label);
  }
  return pool;
}

}  // namespace

std::optional<McqVariant> parse_variant(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "standard") return McqVariant::standard;
  if (c == "lesion_condition" || c == "lesion-condition" || c == "lesion") {
    return McqVariant::lesion_condition;
  }
  if (c == "hierarchical") return McqVariant::hierarchical;
  if (c == "ddx") return McqVariant::ddx;
  return std::nullopt;
}

std::string_view to_string(McqVariant v) {
  switch (v) {
    case McqVariant::standard: return "standard";
    case McqVariant::lesion_condition: return "lesion_condition";
    case McqVariant::hierarchical: return "hierarchical";
    case McqVariant::ddx: return "ddx";
  }
  return "standard";
}

std::optional<QuestionTemplate> parse_question_template(std::string_view name) {
  const std::string c = canonical_label(name);
  if (c == "rl") return QuestionTemplate::rl_training;
  if (c == "eval") return QuestionTemplate::disease_eval;
  if (c == "lesion") return QuestionTemplate::lesion_condition;
  return std::nullopt;
}

const McqOption* McqItem::option_for(char letter) const {
  for (const auto& opt : options) {
    if (opt.letter == letter) return &opt;
  }
  return nullptr;
}

void McqBuildConfig::validate() const {
  if (n_opts < 2) throw DataError("n_opts must be >= 2");
  if (n_opts > 26) throw DataError("n_opts must be <= 26 (single letters)");
  if (p_local < 0.0 || p_local > 1.0) throw DataError("p_local must be in [0, 1]");
  if (gran_scale <= 0.0 || gran_scale > 1.0) throw DataError("gran_scale must be in (0, 1]");
}

std::string render_question(std::span<const McqOption> options, QuestionTemplate tmpl,
                            std::string_view stem) {
  if (tmpl == QuestionTemplate::lesion_condition) {
    return std::string(prompts::kLesionCondition);
  }
  std::string question(stem);
  for (const auto& opt : options) {
    question += ' ';
    question += opt.letter;
    question += ": ";
    question += opt.label;
  }
  if (tmpl == QuestionTemplate::rl_training) return prompts::rl_training(question);

  std::string letters;
  for (const auto& opt : options) {
    if (!letters.empty()) letters += '/';
    letters += opt.letter;
  }
  return prompts::disease_eval(question, letters);
}

McqItem build_mcq(const std::string& id, const std::string& image_ref,
                  std::string_view ground_truth_label,
                  std::span<const std::string> local_labels,
                  const TaxonomyTree& global_tree, const McqBuildConfig& cfg,
                  std::uint64_t seed) {
  cfg.validate();
  McqItem item;
  item.id = id;
  item.image_ref = image_ref;
  item.variant = McqVariant::standard;
  item.ground_truth = global_tree.path_of(ground_truth_label);
  const std::string leaf = item.ground_truth.leaf();

  std::vector<std::string> global_pool = global_tree.labels();
  erase_label(global_pool, leaf);

  std::vector<std::string> local_pool;
  for (const auto& raw : local_labels) {
    const std::string c = canonical_label(raw);
    if (c == leaf || !global_tree.contains(c)) continue;
    local_pool.push_back(c);
  }
  std::sort(local_pool.begin(), local_pool.end());
  local_pool.erase(std::unique(local_pool.begin(), local_pool.end()), local_pool.end());

  if (global_pool.size() + 1 < static_cast<std::size_t>(cfg.n_opts)) {
    throw DataError("not enough distinct labels for " + std::to_string(cfg.n_opts) +
                    " options (have " + std::to_string(global_pool.size() + 1) + ")");
  }

  Rng rng(mix_seed(seed, id));
  std::vector<OptionDraft> drafts;
  drafts.push_back({leaf, false});

  if (cfg.inject_ancestor && item.ground_truth.length() >= 2) {
    const auto ancestor_count = item.ground_truth.length() - 1;
    const std::string ancestor =
        item.ground_truth.path[rng.uniform_index(ancestor_count)];
    drafts.push_back({ancestor, false});
    erase_label(global_pool, ancestor);
    erase_label(local_pool, ancestor);
  }

  while (drafts.size() < static_cast<std::size_t>(cfg.n_opts)) {
    const bool prefer_local = rng.bernoulli(cfg.p_local);
    std::vector<std::string>* pool = nullptr;
    if (prefer_local && !local_pool.empty()) {
      pool = &local_pool;
    } else if (!global_pool.empty()) {
      pool = &global_pool;
    } else if (!local_pool.empty()) {
      pool = &local_pool;
    } else {
      throw DataError("label pools exhausted while filling options for \"" + id + "\"");
    }
    const std::string label = draw_label(*pool, rng);
    erase_label(pool == &local_pool ? global_pool : local_pool, label);
    drafts.push_back({label, false});
  }

  return finalize_item(std::move(item), std::move(drafts), cfg, rng);
}

McqItem build_lesion_condition(const McqItem& item) {
  McqItem out = item;
  out.variant = McqVariant::lesion_condition;
  out.options = {{'A', "benign", 0.0, false},
                 {'B', "malignant", 0.0, false},
                 {'C', "precancerous in situ", 0.0, false}};
  switch (item.ground_truth.malignancy) {
    case Malignancy::benign: out.correct_letter = 'A'; break;
    case Malignancy::malignant: out.correct_letter = 'B'; break;
    case Malignancy::precancerous_in_situ: out.correct_letter = 'C'; break;
  }
  out.question = std::string(prompts::kLesionCondition);
  return out;
}

VariantResult build_hierarchical_variant(const McqItem& item,
                                         const TaxonomyTree& global_tree,
                                         const McqBuildConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (item.ground_truth.length() < 2) {
    return {std::nullopt, "ground truth \"" + item.ground_truth.leaf() +
                              "\" has no ancestors (path length 1)"};
  }
  McqItem out = item;
  out.variant = McqVariant::hierarchical;
  const std::size_t n_opts = item.options.empty()
                                 ? static_cast<std::size_t>(cfg.n_opts)
                                 : item.options.size();

  Rng rng(mix_seed(seed, item.id));
  std::vector<OptionDraft> drafts;
  drafts.push_back({out.ground_truth.leaf(), false});
  std::set<std::string> taken{out.ground_truth.leaf()};

  // Nearest ancestors first: the parent is the hardest distractor.
  for (std::size_t i = out.ground_truth.length() - 1;
       i > 0 && drafts.size() < n_opts; --i) {
    const auto& ancestor = out.ground_truth.path[i - 1];
    drafts.push_back({ancestor, false});
    taken.insert(ancestor);
  }

  std::vector<std::string> pads = off_path_pool(global_tree, out.ground_truth, taken);
  while (drafts.size() < n_opts) {
    if (pads.empty()) {
      throw DataError("not enough off-path labels to pad item \"" + item.id + "\"");
    }
    drafts.push_back({draw_label(pads, rng), true});
  }

  return {finalize_item(std::move(out), std::move(drafts), cfg, rng), ""};
}

McqItem build_ddx_variant(const McqItem& item, const DdxGraph& ddx,
                          const TaxonomyTree& global_tree, const McqBuildConfig& cfg,
                          std::uint64_t seed) {
  cfg.validate();
  McqItem out = item;
  out.variant = McqVariant::ddx;
  const std::size_t n_opts = item.options.empty()
                                 ? static_cast<std::size_t>(cfg.n_opts)
                                 : item.options.size();
  const std::string leaf = out.ground_truth.leaf();

  // Candidate rule of the DDX fallback search: own neighborhood first, then
  // the parent's.
  std::vector<std::string> neighbors;
  const auto& own = ddx.neighbors(leaf);
  if (!own.empty()) {
    neighbors.assign(own.begin(), own.end());
  } else if (const auto parent = global_tree.parent_of(leaf)) {
    const auto& padj = ddx.neighbors(*parent);
    neighbors.assign(padj.begin(), padj.end());
  }
  std::erase(neighbors, leaf);

  Rng rng(mix_seed(seed, item.id));
  rng.shuffle(neighbors);

  std::vector<OptionDraft> drafts;
  drafts.push_back({leaf, false});
  std::set<std::string> taken{leaf};
  for (const auto& nbr : neighbors) {
    if (drafts.size() >= n_opts) break;
    if (!taken.insert(nbr).second) continue;
    drafts.push_back({nbr, false});
  }

  std::vector<std::string> pads = off_path_pool(global_tree, out.ground_truth, taken);
  while (drafts.size() < n_opts) {
    if (pads.empty()) {
      throw DataError("not enough off-path labels to pad item \"" + item.id + "\"");
    }
    drafts.push_back({draw_label(pads, rng), true});
  }

  return finalize_item(std::move(out), std::move(drafts), cfg, rng);
}

ScoreTarget score_target(const McqItem& item) {
  ScoreTarget target;
  target.truth = item.ground_truth;
  target.options.reserve(item.options.size());
  for (const auto& opt : item.options) {
    target.options.push_back({opt.letter, opt.label});
  }
  return target;
}

}  // namespace dxtk
