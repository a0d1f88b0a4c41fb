#pragma once

// Desk-scale S-GRPO: a tabular per-position softmax policy over a small
// token vocabulary, group sampling, group-relative advantages, the clipped
// surrogate, a KL penalty toward a reference policy and a supervised
// log-ratio term on the gold label.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "folreward/le_metric.hpp"

namespace folreward::sgrpo {

using TokenId = std::uint32_t;
using Sequence = std::vector<TokenId>;

struct PromptSpec {
  std::size_t prompt_id = 0;
  Sequence label;
  std::string reference_formula;
};

enum class PolicyRole { Current, Old, Reference };

/// Logits indexed [prompt][position][token].
class PolicyParams {
 public:
  PolicyParams() = default;
  PolicyParams(std::size_t prompts, std::size_t positions, std::size_t vocab, PolicyRole role = PolicyRole::Current);

  std::size_t prompts() const { return prompts_; }
  std::size_t positions() const { return positions_; }
  std::size_t vocab() const { return vocab_; }
  PolicyRole role() const { return role_; }

  /// Copy with a different role; used for old-policy snapshots.
  PolicyParams with_role(PolicyRole role) const;

  double& logit(std::size_t prompt, std::size_t position, TokenId token);
  double logit(std::size_t prompt, std::size_t position, TokenId token) const;

  std::span<double> logits() { return logits_; }
  std::span<const double> logits() const { return logits_; }

  /// Log-softmax over the vocabulary at one (prompt, position).
  std::vector<double> log_probs(std::size_t prompt, std::size_t position) const;
  double log_prob(std::size_t prompt, std::size_t position, TokenId token) const;
  /// Sum of per-position log-probabilities of `seq`.
  double sequence_log_prob(std::size_t prompt, const Sequence& seq) const;

 private:
  std::size_t index(std::size_t prompt, std::size_t position, TokenId token) const;

  std::size_t prompts_ = 0;
  std::size_t positions_ = 0;
  std::size_t vocab_ = 0;
  PolicyRole role_ = PolicyRole::Current;
  std::vector<double> logits_;
};

struct Hyperparams {
  std::size_t group_size = 8;
  double clip_epsilon = 0.2;
  double kl_beta = 0.04;
  double sft_weight = 1.0;
  double std_epsilon = 1e-8;
  double learning_rate = 0.5;
  std::size_t max_length = 12;
  std::uint64_t seed = 7;
  /// PPO-style min(ratio * A, clip(ratio) * A) instead of clip(ratio) * A.
  bool min_form = false;
  /// Average per-token ratios instead of one sequence-level ratio.
  bool per_token_ratio = false;
  /// Gradient steps taken on each sampled group.
  std::size_t inner_epochs = 1;

  void validate() const;
};

class SampleGroup {
 public:
  std::vector<Sequence> outputs;
  std::vector<std::vector<double>> old_logprobs;

  const std::vector<double>& rewards() const { return rewards_; }
  const std::vector<double>& advantages() const { return advantages_; }
  bool has_advantages() const { return !advantages_.empty(); }

  /// Rejects rewards outside [0, 1].
  void set_rewards(std::vector<double> rewards);
  /// Normalizes the stored rewards into group-relative advantages.
  void normalize(double std_epsilon);
  /// Installs precomputed advantages (one per output).
  void set_advantages(std::vector<double> advantages);

 private:
  std::vector<double> rewards_;
  std::vector<double> advantages_;
};

/// Draws hp.group_size sequences of hp.max_length tokens, each position
/// sampled independently from softmax(logits). The policy must be an Old
/// snapshot.
SampleGroup sample_group(const PolicyParams& policy, const PromptSpec& prompt, const Hyperparams& hp,
                         std::mt19937_64& rng);
SampleGroup sample_group(const PolicyParams& policy, const PromptSpec& prompt, const Hyperparams& hp);

/// (r_i - mean) / max(popstd, std_epsilon); all-equal rewards give zeros.
std::vector<double> group_advantages(std::span<const double> rewards, double std_epsilon);

/// Mean over positions of r - log r - 1 with r = pi_ref / pi_theta on the
/// sampled tokens.
double kl_estimate(const PolicyParams& current, const PolicyParams& reference, const Sequence& output,
                   const PromptSpec& prompt);

/// log pi_theta(y|q) - log pi_ref(y|q) summed over label positions.
double sft_term(const PolicyParams& current, const PolicyParams& reference, const PromptSpec& prompt);

struct ObjectiveTerms {
  double surrogate = 0.0;  // mean clipped surrogate
  double sft = 0.0;        // unweighted log-ratio term
  double kl = 0.0;         // mean KL estimate
  double objective = 0.0;  // surrogate + sft_weight * sft - kl_beta * kl
};

ObjectiveTerms sgrpo_objective(const PolicyParams& current, const PolicyParams& old, const PolicyParams& reference,
                               const PromptSpec& prompt, const SampleGroup& group, const Hyperparams& hp);

/// Analytic gradient of sgrpo_objective(...).objective with respect to
/// current's logits, laid out like PolicyParams::logits().
std::vector<double> objective_gradient(const PolicyParams& current, const PolicyParams& old,
                                       const PolicyParams& reference, const PromptSpec& prompt,
                                       const SampleGroup& group, const Hyperparams& hp);

struct TrainConfig {
  std::vector<std::string> vocab;
  /// Token that ends a sampled sequence when rendered; -1 for none.
  int eos = -1;
  std::vector<PromptSpec> prompts;
  Hyperparams hp;
  std::size_t iterations = 500;
  LeMode reward_mode = LeMode::Optimized;
  LeConfig le;

  void validate() const;
};

/// Small FOL vocabulary with three prompts and their gold token labels.
TrainConfig default_train_config();

/// Reads a JSON training config; missing fields keep their defaults.
TrainConfig load_train_config(const std::string& json_text);

struct TraceRow {
  std::size_t iter = 0;
  double mean_reward = 0.0;
  double reward_std = 0.0;
  double surrogate = 0.0;
  double sft = 0.0;
  double kl = 0.0;
  double objective = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  PolicyParams final_policy;
};

/// Space-joined tokens up to the first eos.
std::string render_sequence(const Sequence& seq, const std::vector<std::string>& vocab, int eos);

/// LE reward of a rendered sequence against the prompt's formula, clamped
/// to [0, 1]; anything that fails to parse or score yields 0.
double sequence_reward(const Sequence& seq, const PromptSpec& prompt, const TrainConfig& config);

TrainTrace train_demo(const TrainConfig& config);

/// One JSON object per line: iter, mean_reward, reward_std, surrogate, sft,
/// kl, objective.
void write_trace_jsonl(const TrainTrace& trace, std::ostream& out);

}  // namespace folreward::sgrpo
