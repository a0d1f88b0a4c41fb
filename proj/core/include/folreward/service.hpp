#pragma once

// Newline-delimited JSON scoring service. Each request line yields exactly
// one response line (except shutdown); responses carry the request id.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "folreward/corpus.hpp"
#include "folreward/le_metric.hpp"

namespace folreward {

struct ServiceConfig {
  LeConfig le;
  LeMode mode = LeMode::Optimized;
  BleuConfig bleu;
  /// Requests scored concurrently; responses may then arrive out of order.
  unsigned workers = 1;
};

/// Flat "key = value" text with '#' comments. Keys: threshold, chunk_size
/// (integer or "none"), max_atoms, mode, ngram_sizes (comma list),
/// bleu_smoothing, workers.
ServiceConfig parse_service_config(std::string_view text);
ServiceConfig load_service_config(const std::filesystem::path& path);

enum class ScoreOp { LeScore, BleuPair, Shutdown };

struct ScoreOverrides {
  std::optional<double> threshold;
  std::optional<std::size_t> chunk_size;
  std::optional<std::size_t> max_atoms;
};

struct ScoreRequest {
  std::string id;
  ScoreOp op = ScoreOp::LeScore;
  std::string prediction;
  std::string reference;
  std::optional<LeMode> mode;
  ScoreOverrides overrides;
};

/// Malformed request; `id` is the request id when one could be read, "?" otherwise.
class BadRequest : public std::runtime_error {
 public:
  BadRequest(std::string id, const std::string& what) : std::runtime_error(what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

ScoreRequest parse_request(std::string_view line);

struct ServiceError {
  std::string code;  // BAD_REQUEST, CAP_EXCEEDED or INTERNAL
  std::string message;
};

struct ScoreResponse {
  std::string id;
  std::optional<double> score;
  /// LE report behind an le_score result.
  std::optional<LeReport> report;
  /// Set when the prediction could not be parsed and scored 0.
  std::optional<std::string> warning;
  /// Raw corpus BLEU (0..100) behind a bleu_pair result.
  std::optional<double> bleu;
  std::optional<ServiceError> error;
};

ScoreResponse handle_request(const ScoreRequest& req, const ServiceConfig& config);

/// Parses and handles one line; never throws. Returns nullopt for shutdown.
std::optional<ScoreResponse> handle_line(std::string_view line, const ServiceConfig& config);

/// Single-line JSON with keys id, score, detail, error in that order.
std::string response_to_json(const ScoreResponse& resp);

/// Serves until end of input or a shutdown request. Returns the number of
/// responses written.
std::size_t serve(std::istream& in, std::ostream& out, const ServiceConfig& config);

/// Listens on a unix domain socket and serves connections one after another
/// until a shutdown request arrives. The socket file is removed on exit.
void serve_unix_socket(const std::filesystem::path& socket_path, const ServiceConfig& config);

}  // namespace folreward
