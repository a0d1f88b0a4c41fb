#include "folreward/corpus.hpp"

#include <atomic>
#include <fstream>
#include <numeric>
#include <optional>
#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace folreward {

PairFormat parse_pair_format(std::string_view text) {
  if (text == "jsonl") return PairFormat::Jsonl;
  if (text == "tsv") return PairFormat::Tsv;
  throw std::invalid_argument("unknown pair format '" + std::string(text) + "'");
}

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

EvalPair parse_jsonl_row(std::string_view line, std::size_t row) {
  const auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw std::runtime_error("row is not a JSON object");
  EvalPair p;
  if (auto it = j.find("id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw std::runtime_error("\"id\" must be a string");
    p.id = it->get<std::string>();
  } else {
    p.id = std::to_string(row);
  }
  for (const char* key : {"prediction", "reference"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw std::runtime_error(std::string("missing string field \"") + key + "\"");
  }
  p.prediction = j["prediction"].get<std::string>();
  p.reference = j["reference"].get<std::string>();
  return p;
}

EvalPair parse_tsv_row(std::string_view line, std::size_t row) {
  const auto cols = split_tabs(line);
  if (cols.size() == 2) return EvalPair{std::to_string(row), cols[0], cols[1]};
  if (cols.size() == 3) return EvalPair{cols[0], cols[1], cols[2]};
  throw std::runtime_error("expected 2 or 3 tab-separated columns, found " + std::to_string(cols.size()));
}

}  // namespace

LoadResult parse_pairs(std::string_view content, PairFormat format) {
  LoadResult result;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t row = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      EvalPair p = format == PairFormat::Jsonl ? parse_jsonl_row(line, row) : parse_tsv_row(line, row);
      if (!ids.insert(p.id).second) throw std::runtime_error("duplicate id \"" + p.id + "\"");
      result.pairs.push_back(std::move(p));
    } catch (const std::exception& e) {
      result.malformed.push_back(RowError{line_no, e.what()});
    }
    ++row;
  }
  return result;
}

LoadResult load_pairs(const std::filesystem::path& path, PairFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pairs(buf.str(), format);
}

CorpusReport corpus_le(const std::vector<EvalPair>& pairs, LeMode mode, const CorpusOptions& options) {
  if (pairs.empty()) throw std::invalid_argument("empty corpus");

  struct Slot {
    std::optional<LeReport> report;
    std::string error;
  };
  std::vector<Slot> slots(pairs.size());
  auto work = [&](std::size_t i) {
    try {
      slots[i].report = le_score(pairs[i].prediction, pairs[i].reference, mode, options.le);
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pairs.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < pairs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < pairs.size(); i = next++) work(i);
      });
    }
  }

  CorpusReport report;
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (slots[i].report) {
      sum += slots[i].report->score;
      report.per_pair.push_back(ScoredPair{pairs[i].id, std::move(*slots[i].report)});
    } else {
      report.failures.push_back(PairFailure{pairs[i].id, std::move(slots[i].error)});
    }
  }
  report.mean_le = sum / static_cast<double>(pairs.size());
  report.bleu = corpus_bleu(pairs, options.bleu);
  return report;
}

}  // namespace folreward
