#include "dxtk/grpo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "dxtk/errors.hpp"
#include "dxtk/rng.hpp"

namespace dxtk {

namespace {

constexpr double kSigmaFloor = 1e-12;

std::vector<double> log_softmax(std::span<const double> logits, double temperature) {
  std::vector<double> scaled(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) scaled[i] = logits[i] / temperature;
  const double max = *std::max_element(scaled.begin(), scaled.end());
  double sum = 0.0;
  for (double v : scaled) sum += std::exp(v - max);
  const double log_z = max + std::log(sum);
  for (double& v : scaled) v -= log_z;
  return scaled;
}

int sample_categorical(std::span<const double> probs, Rng& rng) {
  double u = rng.uniform_double();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    u -= probs[i];
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

Malignancy category_of(int index) {
  switch (index) {
    case 0: return Malignancy::benign;
    case 1: return Malignancy::malignant;
    default: return Malignancy::precancerous_in_situ;
  }
}

}  // namespace

void GrpoConfig::validate() const {
  if (group_size < 2) throw DataError("group_size must be >= 2");
  if (clip_epsilon <= 0.0) throw DataError("clip_epsilon must be > 0");
  if (kl_coeff < 0.0) throw DataError("kl_coeff must be >= 0");
  if (temperature <= 0.0) throw DataError("temperature must be > 0");
  if (learning_rate < 0.0) throw DataError("learning_rate must be >= 0");
  if (steps < 0) throw DataError("steps must be >= 0");
  if (batch_size < 1) throw DataError("batch_size must be >= 1");
  if (format_corruption_prob < 0.0 || format_corruption_prob > 1.0) {
    throw DataError("format_corruption_prob must be in [0, 1]");
  }
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw DataError("group_advantages requires at least 2 rewards");
  }
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;  // population variance
  const double sigma = std::sqrt(var);

  std::vector<double> out(rewards.size(), 0.0);
  if (sigma < kSigmaFloor) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = (rewards[i] - mean) / sigma;
  }
  return out;
}

GrpoGroup GrpoGroup::from_rewards(std::span<const double> rewards) {
  GrpoGroup group;
  group.candidates.resize(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    group.candidates[i].reward = rewards[i];
  }
  group.advantages = group_advantages(rewards);
  return group;
}

double clipped_term(double logprob_new, double logprob_old, double advantage,
                    double epsilon) {
  const double rho = std::exp(logprob_new - logprob_old);
  const double clipped = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(rho * advantage, clipped * advantage);
}

double categorical_kl(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("categorical_kl: length mismatch");
  double sum_p = 0.0, sum_q = 0.0;
  for (double v : p) sum_p += v;
  for (double v : q) sum_q += v;
  if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9) {
    throw DataError("categorical_kl: inputs must sum to 1");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] <= 0.0) {
      throw DataError("categorical_kl: support violation at index " + std::to_string(i));
    }
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

std::vector<double> softmax(std::span<const double> logits, double temperature) {
  auto logp = log_softmax(logits, temperature);
  for (double& v : logp) v = std::exp(v);
  return logp;
}

ObjectiveEval grpo_objective(const GrpoGroup& group,
                             std::span<const std::vector<int>> choices,
                             std::span<const CategoricalHead> heads,
                             const GrpoConfig& cfg) {
  const std::size_t k = group.candidates.size();
  if (choices.size() != k || group.advantages.size() != k) {
    throw DataError("grpo_objective: group, advantages, and choices must align");
  }

  ObjectiveEval eval;
  eval.grad.resize(heads.size());

  std::vector<std::vector<double>> logp(heads.size());
  std::vector<std::vector<double>> probs(heads.size());
  std::vector<std::vector<double>> ref_probs(heads.size());
  for (std::size_t h = 0; h < heads.size(); ++h) {
    logp[h] = log_softmax(heads[h].logits, cfg.temperature);
    probs[h] = softmax(heads[h].logits, cfg.temperature);
    ref_probs[h] = softmax(heads[h].ref_logits, cfg.temperature);
    eval.grad[h].assign(heads[h].logits.size(), 0.0);
  }

  // Surrogate: mean_j min(rho_j A_j, clip(rho_j) A_j). The gradient flows
  // through rho_j unless the min picks the clipped constant.
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t j = 0; j < k; ++j) {
    double logprob_new = 0.0;
    for (std::size_t h = 0; h < heads.size(); ++h) {
      logprob_new += logp[h][static_cast<std::size_t>(choices[j][h])];
    }
    const double logprob_old = group.candidates[j].logprob_old;
    const double advantage = group.advantages[j];
    const double rho = std::exp(logprob_new - logprob_old);
    eval.surrogate += inv_k * clipped_term(logprob_new, logprob_old, advantage,
                                           cfg.clip_epsilon);

    const bool active = advantage >= 0.0 ? rho <= 1.0 + cfg.clip_epsilon
                                         : rho >= 1.0 - cfg.clip_epsilon;
    if (!active || advantage == 0.0) continue;
    const double coeff = inv_k * advantage * rho / cfg.temperature;
    for (std::size_t h = 0; h < heads.size(); ++h) {
      const auto chosen = static_cast<std::size_t>(choices[j][h]);
      for (std::size_t i = 0; i < eval.grad[h].size(); ++i) {
        const double indicator = i == chosen ? 1.0 : 0.0;
        eval.grad[h][i] += coeff * (indicator - probs[h][i]);
      }
    }
  }

  // KL(p_new || p_ref), summed over the independent heads.
  for (std::size_t h = 0; h < heads.size(); ++h) {
    const double kl = categorical_kl(probs[h], ref_probs[h]);
    eval.kl += kl;
    if (cfg.kl_coeff == 0.0) continue;
    for (std::size_t i = 0; i < eval.grad[h].size(); ++i) {
      if (probs[h][i] <= 0.0) continue;  // x*ln(x) -> 0
      const double diff = std::log(probs[h][i] / ref_probs[h][i]);
      eval.grad[h][i] -= cfg.kl_coeff * probs[h][i] * (diff - kl) / cfg.temperature;
    }
  }

  eval.value = eval.surrogate - cfg.kl_coeff * eval.kl;
  return eval;
}

SyntheticPolicy::SyntheticPolicy(std::span<const McqItem> items, double temperature)
    : temperature_(temperature) {
  for (const auto& item : items) {
    Heads heads;
    heads.option.logits.assign(item.options.size(), 0.0);
    heads.option.ref_logits.assign(item.options.size(), 0.0);
    heads.malignancy.logits.assign(3, 0.0);
    heads.malignancy.ref_logits.assign(3, 0.0);
    heads_.emplace(item.id, std::move(heads));
  }
}

CategoricalHead& SyntheticPolicy::option_head(const std::string& item_id) {
  return heads_.at(item_id).option;
}

CategoricalHead& SyntheticPolicy::malignancy_head(const std::string& item_id) {
  return heads_.at(item_id).malignancy;
}

const CategoricalHead& SyntheticPolicy::option_head(const std::string& item_id) const {
  return heads_.at(item_id).option;
}

const CategoricalHead& SyntheticPolicy::malignancy_head(const std::string& item_id) const {
  return heads_.at(item_id).malignancy;
}

double SyntheticPolicy::greedy_accuracy(std::span<const McqItem> items) const {
  if (items.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& item : items) {
    const auto& logits = heads_.at(item.id).option.logits;
    const auto argmax =
        std::max_element(logits.begin(), logits.end()) - logits.begin();
    if (item.options[static_cast<std::size_t>(argmax)].letter == item.correct_letter) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

double SyntheticPolicy::mean_reference_kl() const {
  if (heads_.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [id, heads] : heads_) {
    total += categorical_kl(softmax(heads.option.logits, temperature_),
                            softmax(heads.option.ref_logits, temperature_));
    total += categorical_kl(softmax(heads.malignancy.logits, temperature_),
                            softmax(heads.malignancy.ref_logits, temperature_));
  }
  return total / static_cast<double>(heads_.size());
}

std::string TrainingReport::curve_table() const {
  std::ostringstream out;
  out << "step\tmean_reward\tmean_format\tmean_gran\tmean_malignancy\tmean_kl"
         "\tgreedy_accuracy\n";
  out.precision(10);
  for (const auto& s : steps) {
    out << s.step << '\t' << s.mean_reward << '\t' << s.mean_format << '\t'
        << s.mean_gran << '\t' << s.mean_malignancy << '\t' << s.mean_kl << '\t'
        << s.greedy_accuracy << '\n';
  }
  return out.str();
}

TrainingReport simulate(std::span<const McqItem> items, const GrpoConfig& cfg,
                        const RewardConfig& reward_cfg) {
  cfg.validate();
  if (items.empty()) throw DataError("simulate: empty item list");

  const TagSet tags = TagSet::rl();
  SyntheticPolicy policy(items, cfg.temperature);
  Rng rng(cfg.seed);

  TrainingReport report;
  report.config = cfg;
  report.initial_greedy_accuracy = policy.greedy_accuracy(items);

  const auto k = static_cast<std::size_t>(cfg.group_size);
  for (int step = 0; step < cfg.steps; ++step) {
    StepStats stats;
    stats.step = step;
    std::size_t scored = 0;

    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto& item = items[rng.uniform_index(items.size())];
      auto& option_head = policy.option_head(item.id);
      auto& malignancy_head = policy.malignancy_head(item.id);

      const auto option_probs = softmax(option_head.logits, cfg.temperature);
      const auto malignancy_probs = softmax(malignancy_head.logits, cfg.temperature);

      GrpoGroup group;
      group.candidates.resize(k);
      std::vector<std::vector<int>> choices(k, std::vector<int>(2, 0));
      std::vector<double> rewards(k, 0.0);

      for (std::size_t j = 0; j < k; ++j) {
        const int opt = sample_categorical(option_probs, rng);
        const int mal = sample_categorical(malignancy_probs, rng);
        choices[j][0] = opt;
        choices[j][1] = mal;
        // Single pass per batch: the sampling policy is the current policy.
        group.candidates[j].logprob_old =
            std::log(option_probs[static_cast<std::size_t>(opt)]) +
            std::log(malignancy_probs[static_cast<std::size_t>(mal)]);

        std::string completion =
            "<thinking>The lesion features point to one option.</thinking>\n"
            "<final diagnosis>";
        completion += item.options[static_cast<std::size_t>(opt)].letter;
        completion += ", ";
        completion += to_string(category_of(mal));
        completion += "</final diagnosis>";
        if (cfg.format_corruption_prob > 0.0 && rng.bernoulli(cfg.format_corruption_prob)) {
          completion.resize(completion.size() - tags.close_answer.size());
        }

        const RewardBreakdown breakdown =
            total_reward(completion, item, tags, ParseMode::strict, reward_cfg);
        rewards[j] = breakdown.total;
        group.candidates[j].reward = breakdown.total;
        stats.mean_reward += breakdown.total;
        stats.mean_format += breakdown.format;
        stats.mean_gran += breakdown.gran;
        stats.mean_malignancy += breakdown.malignancy;
        ++scored;
      }
      group.advantages = group_advantages(rewards);

      const std::array<CategoricalHead, 2> heads{option_head, malignancy_head};
      const auto eval = grpo_objective(group, choices, heads, cfg);
      for (std::size_t i = 0; i < option_head.logits.size(); ++i) {
        option_head.logits[i] += cfg.learning_rate * eval.grad[0][i];
      }
      for (std::size_t i = 0; i < malignancy_head.logits.size(); ++i) {
        malignancy_head.logits[i] += cfg.learning_rate * eval.grad[1][i];
      }
      stats.mean_kl += eval.kl;
    }

    if (scored > 0) {
      stats.mean_reward /= static_cast<double>(scored);
      stats.mean_format /= static_cast<double>(scored);
      stats.mean_gran /= static_cast<double>(scored);
      stats.mean_malignancy /= static_cast<double>(scored);
      stats.mean_kl /= static_cast<double>(cfg.batch_size);
    }
    stats.greedy_accuracy = policy.greedy_accuracy(items);
    report.steps.push_back(stats);
  }

  report.final_greedy_accuracy = policy.greedy_accuracy(items);
  report.final_mean_kl = policy.mean_reference_kl();
  return report;
}

}  // namespace dxtk
