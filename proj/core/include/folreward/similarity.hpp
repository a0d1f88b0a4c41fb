#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace folreward {

struct SimilarityConfig {
  std::set<int> ngram_sizes{2, 3};
  double threshold = 0.6;
  bool case_sensitive = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Unit-cost edit distance over code points.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// Sparse character n-gram count vector, pooled over several n. Non-empty
/// strings are framed by start/end sentinels before n-grams are cut, so a
/// one-character string still has a non-empty vector.
class NgramProfile {
 public:
  NgramProfile() = default;
  NgramProfile(std::string_view text, const SimilarityConfig& cfg);

  bool empty() const { return packed_.empty() && wide_.empty(); }
  double norm_squared() const { return norm_squared_; }
  /// Throws std::invalid_argument when one profile uses n-grams longer than
  /// three code points and the other does not.
  double dot(const NgramProfile& other) const;

 private:
  // Grams of up to three code points are packed exactly into one integer;
  // longer sizes fall back to strings. Both lists are sorted by key.
  std::vector<std::pair<std::uint64_t, std::uint32_t>> packed_;
  std::vector<std::pair<std::u32string, std::uint32_t>> wide_;
  bool uses_wide_ = false;
  double norm_squared_ = 0.0;
};

/// Cosine similarity of two profiles; 0 when either is empty.
double cosine(const NgramProfile& a, const NgramProfile& b);

double ngram_cosine(std::string_view a, std::string_view b, const SimilarityConfig& cfg = {});

/// ngram_cosine(a, b) >= cfg.threshold.
bool is_related(std::string_view a, std::string_view b, const SimilarityConfig& cfg = {});

/// Substitutable similarity backend. Must be symmetric and map into [0, 1].
using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

}  // namespace folreward
