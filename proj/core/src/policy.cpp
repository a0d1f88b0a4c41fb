#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "folreward/sgrpo.hpp"

namespace folreward::sgrpo {

PolicyParams::PolicyParams(std::size_t prompts, std::size_t positions, std::size_t vocab, PolicyRole role)
    : prompts_(prompts), positions_(positions), vocab_(vocab), role_(role), logits_(prompts * positions * vocab, 0.0) {
  if (vocab == 0) throw std::invalid_argument("vocabulary must not be empty");
}

PolicyParams PolicyParams::with_role(PolicyRole role) const {
  PolicyParams copy = *this;
  copy.role_ = role;
  return copy;
}

std::size_t PolicyParams::index(std::size_t prompt, std::size_t position, TokenId token) const {
  if (prompt >= prompts_ || position >= positions_ || token >= vocab_) {
    throw std::out_of_range("policy index out of range");
  }
  return (prompt * positions_ + position) * vocab_ + token;
}

double& PolicyParams::logit(std::size_t prompt, std::size_t position, TokenId token) {
  return logits_[index(prompt, position, token)];
}

double PolicyParams::logit(std::size_t prompt, std::size_t position, TokenId token) const {
  return logits_[index(prompt, position, token)];
}

std::vector<double> PolicyParams::log_probs(std::size_t prompt, std::size_t position) const {
  const std::size_t base = index(prompt, position, 0);
  const auto row = std::span<const double>(logits_).subspan(base, vocab_);
  const double top = *std::max_element(row.begin(), row.end());
  double sum = 0.0;
  for (double x : row) sum += std::exp(x - top);
  const double log_z = top + std::log(sum);
  std::vector<double> out(vocab_);
  for (std::size_t v = 0; v < vocab_; ++v) out[v] = row[v] - log_z;
  return out;
}

double PolicyParams::log_prob(std::size_t prompt, std::size_t position, TokenId token) const {
  if (token >= vocab_) throw std::out_of_range("token outside vocabulary");
  return log_probs(prompt, position)[token];
}

double PolicyParams::sequence_log_prob(std::size_t prompt, const Sequence& seq) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) sum += log_prob(prompt, t, seq[t]);
  return sum;
}

void Hyperparams::validate() const {
  if (group_size < 2) throw std::invalid_argument("group_size must be at least 2");
  if (!(clip_epsilon > 0.0)) throw std::invalid_argument("clip_epsilon must be positive");
  if (!(kl_beta >= 0.0)) throw std::invalid_argument("kl_beta must be non-negative");
  if (!(sft_weight >= 0.0)) throw std::invalid_argument("sft_weight must be non-negative");
  if (!(std_epsilon > 0.0)) throw std::invalid_argument("std_epsilon must be positive");
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be non-negative");
  if (max_length == 0) throw std::invalid_argument("max_length must be positive");
  if (inner_epochs == 0) throw std::invalid_argument("inner_epochs must be positive");
}

void SampleGroup::set_rewards(std::vector<double> rewards) {
  if (rewards.size() != outputs.size()) throw std::invalid_argument("one reward per output required");
  for (double r : rewards) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("reward outside [0, 1]: " + std::to_string(r));
  }
  rewards_ = std::move(rewards);
  advantages_.clear();
}

void SampleGroup::normalize(double std_epsilon) { advantages_ = group_advantages(rewards_, std_epsilon); }

void SampleGroup::set_advantages(std::vector<double> advantages) {
  if (advantages.size() != outputs.size()) throw std::invalid_argument("one advantage per output required");
  advantages_ = std::move(advantages);
}

std::vector<double> group_advantages(std::span<const double> rewards, double std_epsilon) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("group needs at least two rewards");
  std::vector<double> out(g, 0.0);
  if (std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; })) return out;

  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= static_cast<double>(g);
  const double scale = std::max(std::sqrt(var), std_epsilon);
  for (std::size_t i = 0; i < g; ++i) out[i] = (rewards[i] - mean) / scale;
  return out;
}

namespace {

// Inverse-CDF draw with a platform-independent uniform in [0, 1).
TokenId draw(const std::vector<double>& log_probs, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double acc = 0.0;
  for (std::size_t v = 0; v < log_probs.size(); ++v) {
    acc += std::exp(log_probs[v]);
    if (u < acc) return static_cast<TokenId>(v);
  }
  return static_cast<TokenId>(log_probs.size() - 1);
}

}  // namespace

SampleGroup sample_group(const PolicyParams& policy, const PromptSpec& prompt, const Hyperparams& hp,
                         std::mt19937_64& rng) {
  if (policy.role() != PolicyRole::Old) throw std::invalid_argument("sampling requires the old-policy snapshot");
  if (hp.max_length > policy.positions()) throw std::invalid_argument("max_length exceeds policy positions");

  std::vector<std::vector<double>> lp(hp.max_length);
  for (std::size_t t = 0; t < hp.max_length; ++t) lp[t] = policy.log_probs(prompt.prompt_id, t);

  SampleGroup group;
  group.outputs.resize(hp.group_size);
  group.old_logprobs.resize(hp.group_size);
  for (std::size_t i = 0; i < hp.group_size; ++i) {
    auto& seq = group.outputs[i];
    auto& logp = group.old_logprobs[i];
    seq.reserve(hp.max_length);
    logp.reserve(hp.max_length);
    for (std::size_t t = 0; t < hp.max_length; ++t) {
      const TokenId tok = draw(lp[t], rng);
      seq.push_back(tok);
      logp.push_back(lp[t][tok]);
    }
  }
  return group;
}

SampleGroup sample_group(const PolicyParams& policy, const PromptSpec& prompt, const Hyperparams& hp) {
  std::mt19937_64 rng(hp.seed + 0x9E3779B97F4A7C15ull * (prompt.prompt_id + 1));
  return sample_group(policy, prompt, hp, rng);
}

}  // namespace folreward::sgrpo
