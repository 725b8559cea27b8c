#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dxtk/mcq.hpp"
#include "dxtk/reward.hpp"

namespace dxtk {

struct GrpoConfig {
  int group_size = 4;
  double clip_epsilon = 0.2;
  double kl_coeff = 0.01;
  double temperature = 1.0;
  double learning_rate = 0.1;
  int steps = 1000;
  std::uint64_t seed = 0;
  int batch_size = 8;
  // Chance that a synthesized candidate drops its closing answer tag, so the
  // format-reward path is exercised during simulation.
  double format_corruption_prob = 0.0;

  void validate() const;  // throws DataError on out-of-range fields
};

struct Candidate {
  double reward = 0.0;
  double logprob_new = 0.0;
  double logprob_old = 0.0;
  double logprob_ref = 0.0;
};

struct GrpoGroup {
  std::vector<Candidate> candidates;
  std::vector<double> advantages;

  static GrpoGroup from_rewards(std::span<const double> rewards);
};

// Group-normalized advantages (r - mean)/sigma with the population standard
// deviation; all zeros when sigma vanishes. Requires at least 2 rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

// min(rho * A, clip(rho, 1-eps, 1+eps) * A) with rho = exp(new - old).
double clipped_term(double logprob_new, double logprob_old, double advantage,
                    double epsilon);

// Exact KL(p || q) for categorical distributions; 0*ln(0) := 0. Both vectors
// must sum to 1 within 1e-9 and q must be positive wherever p is.
double categorical_kl(std::span<const double> p, std::span<const double> q);

std::vector<double> softmax(std::span<const double> logits, double temperature);

// One categorical factor of the synthetic policy with its frozen reference.
struct CategoricalHead {
  std::vector<double> logits;
  std::vector<double> ref_logits;
};

struct ObjectiveEval {
  double value = 0.0;      // surrogate - kl_coeff * kl
  double surrogate = 0.0;  // mean clipped term over the group
  double kl = 0.0;         // summed over heads
  std::vector<std::vector<double>> grad;  // d value / d logits, per head
};

// Clipped group objective with KL regularization toward the reference heads,
// plus its exact gradient with respect to the current logits. choices[j][h]
// is the class candidate j sampled from head h; logprob_old is taken from the
// group's candidates and logprob_new/ref are recomputed from the heads.
ObjectiveEval grpo_objective(const GrpoGroup& group,
                             std::span<const std::vector<int>> choices,
                             std::span<const CategoricalHead> heads,
                             const GrpoConfig& cfg);

// Per-item categorical policy: one head over the item's options and one over
// the three malignancy categories.
class SyntheticPolicy {
 public:
  SyntheticPolicy(std::span<const McqItem> items, double temperature);

  CategoricalHead& option_head(const std::string& item_id);
  CategoricalHead& malignancy_head(const std::string& item_id);
  const CategoricalHead& option_head(const std::string& item_id) const;
  const CategoricalHead& malignancy_head(const std::string& item_id) const;

  double temperature() const { return temperature_; }
  // Fraction of items whose greedy (argmax) option is the correct letter.
  double greedy_accuracy(std::span<const McqItem> items) const;
  // Mean KL to the reference across all heads.
  double mean_reference_kl() const;

 private:
  struct Heads {
    CategoricalHead option;
    CategoricalHead malignancy;
  };
  std::map<std::string, Heads> heads_;
  double temperature_;
};

struct StepStats {
  int step = 0;
  double mean_reward = 0.0;
  double mean_format = 0.0;
  double mean_gran = 0.0;
  double mean_malignancy = 0.0;
  double mean_kl = 0.0;
  double greedy_accuracy = 0.0;
};

struct TrainingReport {
  GrpoConfig config;
  std::vector<StepStats> steps;
  double initial_greedy_accuracy = 0.0;
  double final_greedy_accuracy = 0.0;
  double final_mean_kl = 0.0;

  // Tab-separated (step, series...) table for external plotting.
  std::string curve_table() const;
};

// Seeded bandit-style loop: sample K (option, malignancy) candidates per
// item, synthesize tagged completions, score them with the verifiable reward,
// normalize within the group, and ascend the clipped objective. Single
// optimization pass per batch, so the importance ratio is 1 at update time.
TrainingReport simulate(std::span<const McqItem> items, const GrpoConfig& cfg,
                        const RewardConfig& reward_cfg = {});

}  // namespace dxtk
