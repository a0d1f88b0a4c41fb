#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "folreward/sgrpo.hpp"
#include "folreward/syntax.hpp"
#include "json.hpp"

namespace folreward::sgrpo {
namespace {

using nlohmann::json;

Sequence encode_label(const std::vector<std::string>& tokens, const std::vector<std::string>& vocab) {
  Sequence out;
  for (const auto& tok : tokens) {
    auto it = std::find(vocab.begin(), vocab.end(), tok);
    if (it == vocab.end()) throw std::invalid_argument("label token '" + tok + "' is not in the vocabulary");
    out.push_back(static_cast<TokenId>(it - vocab.begin()));
  }
  return out;
}

TokenId token_from_json(const json& j, const std::vector<std::string>& vocab) {
  if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v < 0 || static_cast<std::size_t>(v) >= vocab.size()) throw std::invalid_argument("token id out of range");
    return static_cast<TokenId>(v);
  }
  if (j.is_string()) return encode_label({j.get<std::string>()}, vocab).front();
  throw std::invalid_argument("token must be a string or an integer");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

double population_std(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

void TrainConfig::validate() const {
  hp.validate();
  if (vocab.empty()) throw std::invalid_argument("vocabulary is empty");
  if (eos < -1 || eos >= static_cast<int>(vocab.size())) throw std::invalid_argument("eos token out of range");
  if (prompts.empty()) throw std::invalid_argument("no prompts configured");
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& p = prompts[i];
    if (p.prompt_id != i) throw std::invalid_argument("prompt ids must be 0..n-1 in order");
    if (p.label.empty()) throw std::invalid_argument("prompt label is empty");
    if (p.label.size() > hp.max_length) throw std::invalid_argument("prompt label longer than max_length");
    for (TokenId t : p.label) {
      if (t >= vocab.size()) throw std::invalid_argument("label token outside vocabulary");
    }
    parse(p.reference_formula);
  }
}

TrainConfig default_train_config() {
  TrainConfig cfg;
  cfg.vocab = {"<eos>", "∀x", "∃x", "(", ")", "¬", "∧", "∨", "→",
               "Human(x)", "Mortal(x)", "Animal(x)", "Plant(x)", "Green(x)"};
  cfg.eos = 0;
  const std::vector<std::pair<std::string, std::vector<std::string>>> prompts = {
      {"∀x (Human(x) → Mortal(x))", {"∀x", "(", "Human(x)", "→", "Mortal(x)", ")", "<eos>"}},
      {"∃x (Animal(x) ∧ ¬Plant(x))", {"∃x", "(", "Animal(x)", "∧", "¬", "Plant(x)", ")", "<eos>"}},
      {"∀x (Plant(x) → Green(x) ∨ Animal(x))",
       {"∀x", "(", "Plant(x)", "→", "Green(x)", "∨", "Animal(x)", ")", "<eos>"}},
  };
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    cfg.prompts.push_back(PromptSpec{i, encode_label(prompts[i].second, cfg.vocab), prompts[i].first});
  }
  return cfg;
}

TrainConfig load_train_config(const std::string& json_text) {
  const json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("training config must be a JSON object");
  TrainConfig cfg = default_train_config();

  read(j, "vocab", cfg.vocab);
  if (auto it = j.find("eos"); it != j.end()) {
    cfg.eos = it->is_null() ? -1 : static_cast<int>(token_from_json(*it, cfg.vocab));
  } else if (j.contains("vocab")) {
    cfg.eos = -1;
  }
  if (auto it = j.find("prompts"); it != j.end()) {
    cfg.prompts.clear();
    for (const auto& pj : *it) {
      PromptSpec p;
      p.prompt_id = cfg.prompts.size();
      p.reference_formula = pj.at("reference_formula").get<std::string>();
      for (const auto& tj : pj.at("label")) p.label.push_back(token_from_json(tj, cfg.vocab));
      cfg.prompts.push_back(std::move(p));
    }
  } else if (j.contains("vocab")) {
    throw std::invalid_argument("a custom vocabulary requires explicit prompts");
  }

  auto& hp = cfg.hp;
  read(j, "group_size", hp.group_size);
  read(j, "clip_epsilon", hp.clip_epsilon);
  read(j, "kl_beta", hp.kl_beta);
  read(j, "sft_weight", hp.sft_weight);
  read(j, "std_epsilon", hp.std_epsilon);
  read(j, "learning_rate", hp.learning_rate);
  read(j, "max_length", hp.max_length);
  read(j, "seed", hp.seed);
  read(j, "min_form", hp.min_form);
  read(j, "per_token_ratio", hp.per_token_ratio);
  read(j, "inner_epochs", hp.inner_epochs);
  read(j, "iterations", cfg.iterations);
  if (auto it = j.find("reward_mode"); it != j.end()) cfg.reward_mode = parse_le_mode(it->get<std::string>());
  read(j, "threshold", cfg.le.similarity.threshold);
  if (auto it = j.find("chunk_size"); it != j.end()) {
    cfg.le.chunk_size = it->is_null() ? std::nullopt : std::optional<std::size_t>(it->get<std::size_t>());
  }
  cfg.validate();
  return cfg;
}

std::string render_sequence(const Sequence& seq, const std::vector<std::string>& vocab, int eos) {
  std::string out;
  for (TokenId t : seq) {
    if (static_cast<int>(t) == eos) break;
    if (t >= vocab.size()) throw std::out_of_range("token outside vocabulary");
    if (!out.empty()) out += ' ';
    out += vocab[t];
  }
  return out;
}

double sequence_reward(const Sequence& seq, const PromptSpec& prompt, const TrainConfig& config) {
  try {
    const std::string text = render_sequence(seq, config.vocab, config.eos);
    if (text.empty()) return 0.0;
    const double s = le_score(text, prompt.reference_formula, config.reward_mode, config.le).score;
    return std::isfinite(s) ? std::clamp(s, 0.0, 1.0) : 0.0;
  } catch (const std::exception&) {
    return 0.0;
  }
}

TrainTrace train_demo(const TrainConfig& config) {
  config.validate();
  const auto& hp = config.hp;
  const std::size_t n_prompts = config.prompts.size();
  const std::size_t vocab = config.vocab.size();

  PolicyParams current(n_prompts, hp.max_length, vocab, PolicyRole::Current);
  const PolicyParams reference = current.with_role(PolicyRole::Reference);
  std::mt19937_64 rng(hp.seed);
  std::map<std::pair<std::size_t, std::string>, double> reward_cache;

  TrainTrace trace;
  trace.rows.reserve(config.iterations);
  for (std::size_t iter = 0; iter < config.iterations; ++iter) {
    TraceRow row;
    row.iter = iter;
    std::vector<double> all_rewards;
    for (const auto& prompt : config.prompts) {
      const PolicyParams old = current.with_role(PolicyRole::Old);
      SampleGroup group = sample_group(old, prompt, hp, rng);

      std::vector<double> rewards;
      rewards.reserve(group.outputs.size());
      for (const auto& seq : group.outputs) {
        auto key = std::make_pair(prompt.prompt_id, render_sequence(seq, config.vocab, config.eos));
        auto it = reward_cache.find(key);
        if (it == reward_cache.end()) it = reward_cache.emplace(std::move(key), sequence_reward(seq, prompt, config)).first;
        rewards.push_back(it->second);
      }
      all_rewards.insert(all_rewards.end(), rewards.begin(), rewards.end());
      group.set_rewards(std::move(rewards));
      group.normalize(hp.std_epsilon);

      const ObjectiveTerms terms = sgrpo_objective(current, old, reference, prompt, group, hp);
      row.surrogate += terms.surrogate;
      row.sft += terms.sft;
      row.kl += terms.kl;
      row.objective += terms.objective;

      for (std::size_t epoch = 0; epoch < hp.inner_epochs; ++epoch) {
        const auto grad = objective_gradient(current, old, reference, prompt, group, hp);
        auto logits = current.logits();
        for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += hp.learning_rate * grad[k];
      }
    }
    const auto np = static_cast<double>(n_prompts);
    row.surrogate /= np;
    row.sft /= np;
    row.kl /= np;
    row.objective /= np;
    double sum = 0.0;
    for (double r : all_rewards) sum += r;
    row.mean_reward = sum / static_cast<double>(all_rewards.size());
    row.reward_std = population_std(all_rewards);
    trace.rows.push_back(row);
  }
  trace.final_policy = std::move(current);
  return trace;
}

void write_trace_jsonl(const TrainTrace& trace, std::ostream& out) {
  for (const auto& r : trace.rows) {
    nlohmann::ordered_json j;
    j["iter"] = r.iter;
    j["mean_reward"] = r.mean_reward;
    j["reward_std"] = r.reward_std;
    j["surrogate"] = r.surrogate;
    j["sft"] = r.sft;
    j["kl"] = r.kl;
    j["objective"] = r.objective;
    out << j.dump() << '\n';
  }
}

}  // namespace folreward::sgrpo
