#include "folreward/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "utf8.hpp"

namespace folreward {
namespace {

constexpr char32_t kStart = U'\u0002';
constexpr char32_t kEnd = U'\u0003';

std::u32string fold(std::string_view s, bool case_sensitive) {
  std::u32string out = detail::decode_utf8(s);
  if (!case_sensitive) {
    for (auto& c : out) {
      if (c >= U'A' && c <= U'Z') c = c - U'A' + U'a';
    }
  }
  return out;
}

}  // namespace

void SimilarityConfig::validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must lie in [0, 1]");
  if (ngram_sizes.empty()) throw std::invalid_argument("ngram_sizes must not be empty");
  if (*ngram_sizes.begin() < 1) throw std::invalid_argument("ngram sizes must be positive");
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(std::u32string_view(detail::decode_utf8(a)), std::u32string_view(detail::decode_utf8(b)));
}

std::size_t levenshtein(std::u32string_view s, std::u32string_view t) {
  if (s.empty()) return t.size();
  if (t.empty()) return s.size();
  // Atom texts are short; keep the DP row on the stack when it fits.
  std::array<std::size_t, 128> small;
  std::vector<std::size_t> large;
  std::size_t* row = small.data();
  if (t.size() + 1 > small.size()) {
    large.resize(t.size() + 1);
    row = large.data();
  }
  for (std::size_t j = 0; j <= t.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (s[i - 1] == t[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[t.size()];
}

NgramProfile::NgramProfile(std::string_view text, const SimilarityConfig& cfg) {
  uses_wide_ = !cfg.ngram_sizes.empty() && *cfg.ngram_sizes.rbegin() > 3;
  if (text.empty()) return;
  std::u32string framed = fold(text, cfg.case_sensitive);
  framed.insert(framed.begin(), kStart);
  framed.push_back(kEnd);

  auto run_length = [](auto& sorted, auto& out) {
    for (auto& g : sorted) {
      if (!out.empty() && out.back().first == g) {
        ++out.back().second;
      } else {
        out.emplace_back(std::move(g), 1);
      }
    }
  };

  if (!uses_wide_) {
    // Code points fit in 21 bits; the +1 keeps grams of different lengths apart.
    std::vector<std::uint64_t> keys;
    keys.reserve(framed.size() * cfg.ngram_sizes.size());
    for (int n : cfg.ngram_sizes) {
      const auto width = static_cast<std::size_t>(n);
      if (width == 0 || width > framed.size()) continue;
      for (std::size_t i = 0; i + width <= framed.size(); ++i) {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < width; ++k) key = (key << 21) | (static_cast<std::uint64_t>(framed[i + k]) + 1);
        keys.push_back(key);
      }
    }
    std::sort(keys.begin(), keys.end());
    packed_.reserve(keys.size());
    run_length(keys, packed_);
    for (const auto& [key, c] : packed_) norm_squared_ += static_cast<double>(c) * c;
    return;
  }

  std::vector<std::u32string> grams;
  for (int n : cfg.ngram_sizes) {
    const auto width = static_cast<std::size_t>(n);
    if (width == 0 || width > framed.size()) continue;
    for (std::size_t i = 0; i + width <= framed.size(); ++i) grams.push_back(framed.substr(i, width));
  }
  std::sort(grams.begin(), grams.end());
  run_length(grams, wide_);
  for (const auto& [gram, c] : wide_) norm_squared_ += static_cast<double>(c) * c;
}

namespace {

template <class Counts>
double sorted_dot(const Counts& x, const Counts& y) {
  double sum = 0.0;
  auto a = x.begin();
  auto b = y.begin();
  while (a != x.end() && b != y.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += static_cast<double>(a->second) * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

}  // namespace

double NgramProfile::dot(const NgramProfile& other) const {
  if (uses_wide_ != other.uses_wide_) throw std::invalid_argument("n-gram profiles built with incompatible sizes");
  return uses_wide_ ? sorted_dot(wide_, other.wide_) : sorted_dot(packed_, other.packed_);
}

double cosine(const NgramProfile& a, const NgramProfile& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double value = a.dot(b) / std::sqrt(a.norm_squared() * b.norm_squared());
  return std::clamp(value, 0.0, 1.0);
}

double ngram_cosine(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
  return cosine(NgramProfile(a, cfg), NgramProfile(b, cfg));
}

bool is_related(std::string_view a, std::string_view b, const SimilarityConfig& cfg) {
  return ngram_cosine(a, b, cfg) >= cfg.threshold;
}

}  // namespace folreward
