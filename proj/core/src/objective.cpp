#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "folreward/sgrpo.hpp"

namespace folreward::sgrpo {
namespace {

void check_shapes(const PolicyParams& a, const PolicyParams& b) {
  if (a.prompts() != b.prompts() || a.positions() != b.positions() || a.vocab() != b.vocab()) {
    throw std::invalid_argument("policy shapes differ");
  }
}

void check_group(const SampleGroup& group, const PolicyParams& policy) {
  if (!group.has_advantages()) throw std::invalid_argument("group advantages have not been computed");
  for (const auto& seq : group.outputs) {
    if (seq.empty() || seq.size() > policy.positions()) throw std::invalid_argument("output length out of range");
    for (TokenId tok : seq) {
      if (tok >= policy.vocab()) throw std::invalid_argument("output token outside vocabulary");
    }
  }
}

// Value and slope of the surrogate for one ratio; `active` is false where the
// clipped branch is selected and the derivative with respect to the ratio is 0.
struct SurrogatePiece {
  double value;
  bool active;
};

SurrogatePiece surrogate_piece(double ratio, double advantage, const Hyperparams& hp) {
  const double lo = 1.0 - hp.clip_epsilon;
  const double hi = 1.0 + hp.clip_epsilon;
  const double clipped = std::clamp(ratio, lo, hi) * advantage;
  const bool inside = ratio > lo && ratio < hi;
  if (!hp.min_form) return {clipped, inside};
  const double raw = ratio * advantage;
  if (raw <= clipped) return {raw, true};
  return {clipped, false};
}

// Adds scale * (onehot(token) - p) at (prompt, position).
void add_logprob_grad(std::vector<double>& grad, const PolicyParams& policy, std::size_t prompt,
                      std::size_t position, TokenId token, const std::vector<double>& log_probs, double scale) {
  const std::size_t base = (prompt * policy.positions() + position) * policy.vocab();
  for (std::size_t v = 0; v < policy.vocab(); ++v) grad[base + v] -= scale * std::exp(log_probs[v]);
  grad[base + token] += scale;
}

}  // namespace

double kl_estimate(const PolicyParams& current, const PolicyParams& reference, const Sequence& output,
                   const PromptSpec& prompt) {
  check_shapes(current, reference);
  if (output.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < output.size(); ++t) {
    const double log_r = reference.log_prob(prompt.prompt_id, t, output[t]) -
                         current.log_prob(prompt.prompt_id, t, output[t]);
    // r - log r - 1 loses precision near r = 1; expm1 keeps it.
    sum += std::expm1(log_r) - log_r;
  }
  return std::max(0.0, sum / static_cast<double>(output.size()));
}

double sft_term(const PolicyParams& current, const PolicyParams& reference, const PromptSpec& prompt) {
  check_shapes(current, reference);
  if (prompt.label.empty()) throw std::invalid_argument("prompt label is empty");
  return current.sequence_log_prob(prompt.prompt_id, prompt.label) -
         reference.sequence_log_prob(prompt.prompt_id, prompt.label);
}

ObjectiveTerms sgrpo_objective(const PolicyParams& current, const PolicyParams& old, const PolicyParams& reference,
                               const PromptSpec& prompt, const SampleGroup& group, const Hyperparams& hp) {
  check_shapes(current, old);
  check_shapes(current, reference);
  check_group(group, current);
  const std::size_t g = group.outputs.size();
  const auto& adv = group.advantages();

  ObjectiveTerms terms;
  for (std::size_t i = 0; i < g; ++i) {
    const auto& seq = group.outputs[i];
    if (hp.per_token_ratio) {
      double acc = 0.0;
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const double ratio = std::exp(current.log_prob(prompt.prompt_id, t, seq[t]) -
                                      old.log_prob(prompt.prompt_id, t, seq[t]));
        acc += surrogate_piece(ratio, adv[i], hp).value;
      }
      terms.surrogate += acc / static_cast<double>(seq.size());
    } else {
      const double ratio =
          std::exp(current.sequence_log_prob(prompt.prompt_id, seq) - old.sequence_log_prob(prompt.prompt_id, seq));
      terms.surrogate += surrogate_piece(ratio, adv[i], hp).value;
    }
    terms.kl += kl_estimate(current, reference, seq, prompt);
  }
  terms.surrogate /= static_cast<double>(g);
  terms.kl /= static_cast<double>(g);
  terms.sft = hp.sft_weight != 0.0 ? sft_term(current, reference, prompt) : 0.0;
  terms.objective = terms.surrogate + hp.sft_weight * terms.sft - hp.kl_beta * terms.kl;
  return terms;
}

std::vector<double> objective_gradient(const PolicyParams& current, const PolicyParams& old,
                                       const PolicyParams& reference, const PromptSpec& prompt,
                                       const SampleGroup& group, const Hyperparams& hp) {
  check_shapes(current, old);
  check_shapes(current, reference);
  check_group(group, current);
  const std::size_t q = prompt.prompt_id;
  const std::size_t g = group.outputs.size();
  const auto& adv = group.advantages();

  std::vector<std::vector<double>> cur_lp(current.positions());
  std::vector<std::vector<double>> old_lp(current.positions());
  std::vector<std::vector<double>> ref_lp(current.positions());
  for (std::size_t t = 0; t < current.positions(); ++t) {
    cur_lp[t] = current.log_probs(q, t);
    old_lp[t] = old.log_probs(q, t);
    ref_lp[t] = reference.log_probs(q, t);
  }

  std::vector<double> grad(current.logits().size(), 0.0);
  const double inv_g = 1.0 / static_cast<double>(g);
  for (std::size_t i = 0; i < g; ++i) {
    const auto& seq = group.outputs[i];
    const double inv_len = 1.0 / static_cast<double>(seq.size());

    if (hp.per_token_ratio) {
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const double ratio = std::exp(cur_lp[t][seq[t]] - old_lp[t][seq[t]]);
        if (surrogate_piece(ratio, adv[i], hp).active) {
          add_logprob_grad(grad, current, q, t, seq[t], cur_lp[t], inv_g * inv_len * adv[i] * ratio);
        }
      }
    } else {
      double log_ratio = 0.0;
      for (std::size_t t = 0; t < seq.size(); ++t) log_ratio += cur_lp[t][seq[t]] - old_lp[t][seq[t]];
      const double ratio = std::exp(log_ratio);
      if (surrogate_piece(ratio, adv[i], hp).active) {
        for (std::size_t t = 0; t < seq.size(); ++t) {
          add_logprob_grad(grad, current, q, t, seq[t], cur_lp[t], inv_g * adv[i] * ratio);
        }
      }
    }

    if (hp.kl_beta != 0.0) {
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const double r = std::exp(ref_lp[t][seq[t]] - cur_lp[t][seq[t]]);
        add_logprob_grad(grad, current, q, t, seq[t], cur_lp[t], -hp.kl_beta * inv_g * inv_len * (1.0 - r));
      }
    }
  }

  if (hp.sft_weight != 0.0) {
    if (prompt.label.empty()) throw std::invalid_argument("prompt label is empty");
    for (std::size_t t = 0; t < prompt.label.size(); ++t) {
      add_logprob_grad(grad, current, q, t, prompt.label[t], cur_lp[t], hp.sft_weight);
    }
  }
  return grad;
}

}  // namespace folreward::sgrpo
