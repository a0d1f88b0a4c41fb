#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "folreward/errors.hpp"
#include "folreward/service.hpp"

namespace folreward {

namespace {

const char* cap_name(CapExceeded::Which which) {
  switch (which) {
    case CapExceeded::Which::ChainLength: return "connective chain length";
    case CapExceeded::Which::Atoms: return "atom count";
    case CapExceeded::Which::FactorialAtoms: return "exhaustive binding atom count";
  }
  return "limit";
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view text, const std::string& key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("invalid value for " + key + ": '" + std::string(text) + "'");
  return value;
}

}  // namespace

CapExceeded::CapExceeded(Which which, std::size_t limit, std::size_t actual)
    : std::runtime_error(std::string(cap_name(which)) + " " + std::to_string(actual) + " exceeds limit " +
                         std::to_string(limit)),
      which_(which),
      limit_(limit),
      actual_(actual) {}

ServiceConfig parse_service_config(std::string_view text) {
  ServiceConfig cfg;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    try {
      if (key == "threshold") {
        cfg.le.similarity.threshold = parse_number<double>(value, key);
      } else if (key == "chunk_size") {
        cfg.le.chunk_size = value == "none" ? std::nullopt : std::optional(parse_number<std::size_t>(value, key));
      } else if (key == "max_atoms") {
        cfg.le.limits.max_atoms = parse_number<std::size_t>(value, key);
      } else if (key == "mode") {
        cfg.mode = parse_le_mode(value);
      } else if (key == "ngram_sizes") {
        cfg.le.similarity.ngram_sizes.clear();
        std::size_t pos = 0;
        while (pos <= value.size()) {
          auto comma = value.find(',', pos);
          if (comma == std::string_view::npos) comma = value.size();
          cfg.le.similarity.ngram_sizes.insert(parse_number<int>(trim(value.substr(pos, comma - pos)), key));
          pos = comma + 1;
        }
      } else if (key == "bleu_smoothing") {
        if (value == "none") {
          cfg.bleu.smoothing_floor.reset();
        } else {
          cfg.bleu.smoothing_floor = parse_number<double>(value, key);
        }
      } else if (key == "workers") {
        cfg.workers = parse_number<unsigned>(value, key);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.le.similarity.validate();
  if (cfg.le.chunk_size && *cfg.le.chunk_size < 2) throw std::invalid_argument("chunk_size must be at least 2");
  if (cfg.bleu.smoothing_floor && !(*cfg.bleu.smoothing_floor > 0.0)) {
    throw std::invalid_argument("bleu_smoothing must be positive");
  }
  return cfg;
}

ServiceConfig load_service_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_service_config(buf.str());
}

}  // namespace folreward
