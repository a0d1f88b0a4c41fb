#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "folreward/le_metric.hpp"

namespace folreward {

struct EvalPair {
  std::string id;
  std::string prediction;
  std::string reference;
};

enum class PairFormat { Jsonl, Tsv };

PairFormat parse_pair_format(std::string_view text);

struct RowError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct LoadResult {
  std::vector<EvalPair> pairs;
  std::vector<RowError> malformed;
};

/// Reads prediction/reference pairs. Blank lines are ignored; malformed rows
/// are skipped and reported. Missing jsonl ids become the row index.
LoadResult load_pairs(const std::filesystem::path& path, PairFormat format);
LoadResult parse_pairs(std::string_view content, PairFormat format);

/// Splits FOL text for BLEU: connectives, parentheses and commas are padded
/// with spaces, then the text is split on whitespace.
std::vector<std::string> bleu_tokenize(std::string_view text);

struct BleuConfig {
  int max_order = 4;
  /// Zero n-gram match counts are replaced by this value when set.
  std::optional<double> smoothing_floor;
};

/// Corpus BLEU in [0, 100] with one reference per pair.
double corpus_bleu(const std::vector<EvalPair>& pairs, const BleuConfig& cfg = {});

struct PairFailure {
  std::string id;
  std::string error;
};

struct ScoredPair {
  std::string id;
  LeReport report;
};

struct CorpusReport {
  double bleu = 0.0;
  double mean_le = 0.0;
  std::vector<ScoredPair> per_pair;
  std::vector<PairFailure> failures;
};

struct CorpusOptions {
  LeConfig le;
  BleuConfig bleu;
  /// Worker threads for per-pair scoring; 0 picks the hardware concurrency.
  unsigned threads = 1;
};

/// Scores every pair. Failed pairs count as 0 toward mean_le and are listed
/// in `failures` instead of `per_pair`.
CorpusReport corpus_le(const std::vector<EvalPair>& pairs, LeMode mode, const CorpusOptions& options = {});

}  // namespace folreward
