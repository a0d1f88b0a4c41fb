#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "folreward/corpus.hpp"

namespace folreward {
namespace {

// Longest spellings first so "<->" is not split as "<" "->".
constexpr std::array<std::string_view, 17> kPadded{
    "<->", "->", "∀", "∃", "¬", "∧", "∨", "→", "↔", "⊕", "(", ")", ",", "~", "&", "|", "^",
};

using NgramCounts = std::map<std::vector<std::string>, int>;

NgramCounts ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

std::vector<std::string> bleu_tokenize(std::string_view text) {
  std::string padded;
  padded.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    bool hit = false;
    for (auto sym : kPadded) {
      if (text.substr(i, sym.size()) == sym) {
        padded += ' ';
        padded += sym;
        padded += ' ';
        i += sym.size();
        hit = true;
        break;
      }
    }
    if (!hit) padded += text[i++];
  }

  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < padded.size()) {
    start = padded.find_first_not_of(" \t\r\n\f\v", start);
    if (start == std::string::npos) break;
    std::size_t end = padded.find_first_of(" \t\r\n\f\v", start);
    if (end == std::string::npos) end = padded.size();
    tokens.push_back(padded.substr(start, end - start));
    start = end;
  }
  return tokens;
}

double corpus_bleu(const std::vector<EvalPair>& pairs, const BleuConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("empty corpus");
  if (cfg.max_order < 1) throw std::invalid_argument("BLEU order must be positive");
  const auto orders = static_cast<std::size_t>(cfg.max_order);

  std::vector<double> matches(orders, 0.0);
  std::vector<double> totals(orders, 0.0);
  double hyp_len = 0.0;
  double ref_len = 0.0;
  for (const auto& p : pairs) {
    const auto hyp = bleu_tokenize(p.prediction);
    const auto ref = bleu_tokenize(p.reference);
    hyp_len += static_cast<double>(hyp.size());
    ref_len += static_cast<double>(ref.size());
    for (std::size_t n = 1; n <= orders; ++n) {
      const auto h = ngrams(hyp, n);
      const auto r = ngrams(ref, n);
      for (const auto& [gram, count] : h) {
        auto it = r.find(gram);
        if (it != r.end()) matches[n - 1] += std::min(count, it->second);
      }
      if (hyp.size() >= n) totals[n - 1] += static_cast<double>(hyp.size() - n + 1);
    }
  }
  if (hyp_len == 0.0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 0; n < orders; ++n) {
    if (totals[n] == 0.0) return 0.0;
    double m = matches[n];
    if (m == 0.0) {
      if (!cfg.smoothing_floor) return 0.0;
      m = *cfg.smoothing_floor;
    }
    log_sum += std::log(m / totals[n]);
  }
  const double brevity = hyp_len < ref_len ? std::exp(1.0 - ref_len / hyp_len) : 1.0;
  return 100.0 * brevity * std::exp(log_sum / static_cast<double>(orders));
}

}  // namespace folreward
