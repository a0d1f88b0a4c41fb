#include "folreward/service.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>
#include <variant>

#include "folreward/errors.hpp"
#include "folreward/syntax.hpp"
#include "json.hpp"

namespace folreward {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::string kUnknownId = "?";

std::string require_string(const json& j, const char* key, const std::string& id) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw BadRequest(id, std::string("missing string field \"") + key + "\"");
  return it->get<std::string>();
}

std::size_t require_count(const json& v, const char* key, const std::string& id) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw BadRequest(id, std::string("override \"") + key + "\" must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

ScoreOverrides parse_overrides(const json& j, const std::string& id) {
  ScoreOverrides o;
  if (j.is_null()) return o;
  if (!j.is_object()) throw BadRequest(id, "\"overrides\" must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "threshold") {
      if (!v.is_number()) throw BadRequest(id, "override \"threshold\" must be a number");
      o.threshold = v.get<double>();
    } else if (key == "chunk_size") {
      o.chunk_size = require_count(v, "chunk_size", id);
    } else if (key == "max_atoms") {
      o.max_atoms = require_count(v, "max_atoms", id);
    } else {
      throw BadRequest(id, "unknown override \"" + key + "\"");
    }
  }
  return o;
}

ordered_json report_detail(const LeReport& r) {
  ordered_json d;
  d["mode"] = to_string(r.mode);
  d["atom_count"] = r.atom_count;
  d["assignments_evaluated"] = r.assignments_evaluated;
  d["bindings_explored"] = r.bindings_explored;
  d["trees_explored"] = r.trees_explored;
  d["truncated"] = r.truncated;
  d["fell_back"] = r.fell_back;
  ordered_json pairs = ordered_json::array();
  for (const auto& [p, q] : r.binding.pairs) pairs.push_back({p.canonical_text, q.canonical_text});
  d["binding"] = std::move(pairs);
  return d;
}

ScoreResponse error_response(std::string id, std::string code, std::string message) {
  ScoreResponse r;
  r.id = std::move(id);
  r.error = ServiceError{std::move(code), std::move(message)};
  return r;
}

LeConfig effective_config(const ScoreRequest& req, const ServiceConfig& config) {
  LeConfig le = config.le;
  if (req.overrides.threshold) le.similarity.threshold = *req.overrides.threshold;
  if (req.overrides.chunk_size) le.chunk_size = *req.overrides.chunk_size;
  if (req.overrides.max_atoms) le.limits.max_atoms = *req.overrides.max_atoms;
  le.similarity.validate();
  if (le.chunk_size && *le.chunk_size < 2) throw std::invalid_argument("chunk_size must be at least 2");
  return le;
}

// Pulls lines from a source and writes responses through `emit`, optionally
// on a worker pool. Returns whether a shutdown request ended the stream.
struct ServeOutcome {
  std::size_t responses = 0;
  bool shutdown = false;
};

ServeOutcome serve_lines(const std::function<bool(std::string&)>& next_line,
                         const std::function<void(const std::string&)>& emit, const ServiceConfig& config) {
  ServeOutcome outcome;
  std::mutex emit_mu;
  std::atomic<std::size_t> count{0};
  auto respond = [&](const ScoreResponse& r) {
    const std::string text = response_to_json(r);
    std::lock_guard lock(emit_mu);
    emit(text);
    ++count;
  };

  using Item = std::variant<ScoreRequest, ScoreResponse>;
  auto classify = [&](const std::string& line) -> std::optional<Item> {
    try {
      ScoreRequest req = parse_request(line);
      if (req.op == ScoreOp::Shutdown) return std::nullopt;
      return Item(std::move(req));
    } catch (const BadRequest& e) {
      return Item(error_response(e.id(), "BAD_REQUEST", e.what()));
    }
  };
  auto process = [&](Item& item) {
    if (auto* req = std::get_if<ScoreRequest>(&item)) {
      respond(handle_request(*req, config));
    } else {
      respond(std::get<ScoreResponse>(item));
    }
  };

  std::string line;
  if (config.workers <= 1) {
    while (next_line(line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto item = classify(line);
      if (!item) {
        outcome.shutdown = true;
        break;
      }
      process(*item);
    }
    outcome.responses = count.load();
    return outcome;
  }

  std::mutex mu;
  std::condition_variable cv;
  std::deque<Item> queue;
  bool closed = false;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < config.workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::unique_lock lock(mu);
          cv.wait(lock, [&] { return closed || !queue.empty(); });
          if (queue.empty()) return;
          Item item = std::move(queue.front());
          queue.pop_front();
          lock.unlock();
          cv.notify_all();
          process(item);
        }
      });
    }
    const std::size_t max_queue = 4 * static_cast<std::size_t>(config.workers);
    while (next_line(line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      auto item = classify(line);
      if (!item) {
        outcome.shutdown = true;
        break;
      }
      std::unique_lock lock(mu);
      cv.wait(lock, [&] { return queue.size() < max_queue; });
      queue.push_back(std::move(*item));
      lock.unlock();
      cv.notify_all();
    }
    {
      std::lock_guard lock(mu);
      closed = true;
    }
    cv.notify_all();
  }
  outcome.responses = count.load();
  return outcome;
}

class FdReader {
 public:
  explicit FdReader(int fd) : fd_(fd) {}

  bool next(std::string& line) {
    for (;;) {
      const auto nl = buf_.find('\n', scan_);
      if (nl != std::string::npos) {
        line.assign(buf_, 0, nl);
        buf_.erase(0, nl + 1);
        scan_ = 0;
        return true;
      }
      scan_ = buf_.size();
      char chunk[4096];
      const ssize_t n = ::read(fd_, chunk, sizeof chunk);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        if (buf_.empty()) return false;
        line = std::move(buf_);
        buf_.clear();
        scan_ = 0;
        return true;
      }
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
  std::size_t scan_ = 0;
};

void write_all(int fd, const std::string& text) {
  std::size_t off = 0;
  while (off < text.size()) {
    const ssize_t n = ::send(fd, text.data() + off, text.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;  // peer went away; remaining responses are dropped
    off += static_cast<std::size_t>(n);
  }
}

struct FdGuard {
  int fd;
  ~FdGuard() {
    if (fd >= 0) ::close(fd);
  }
};

}  // namespace

ScoreRequest parse_request(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw BadRequest(kUnknownId, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw BadRequest(kUnknownId, "request must be a JSON object");

  ScoreRequest req;
  const std::string op = j.contains("op") && j["op"].is_string() ? j["op"].get<std::string>() : "";
  if (op == "shutdown") {
    req.op = ScoreOp::Shutdown;
    return req;
  }
  auto id = j.find("id");
  if (id == j.end() || !id->is_string() || id->get<std::string>().empty()) {
    throw BadRequest(kUnknownId, "missing non-empty string \"id\"");
  }
  req.id = id->get<std::string>();
  for (const auto& [key, _] : j.items()) {
    if (key != "id" && key != "op" && key != "prediction" && key != "reference" && key != "mode" &&
        key != "overrides") {
      throw BadRequest(req.id, "unknown request key \"" + key + "\"");
    }
  }
  if (op == "le_score") {
    req.op = ScoreOp::LeScore;
  } else if (op == "bleu_pair") {
    req.op = ScoreOp::BleuPair;
  } else {
    throw BadRequest(req.id, op.empty() ? "missing string field \"op\"" : "unknown op \"" + op + "\"");
  }
  req.prediction = require_string(j, "prediction", req.id);
  req.reference = require_string(j, "reference", req.id);
  if (auto m = j.find("mode"); m != j.end() && !m->is_null()) {
    if (!m->is_string()) throw BadRequest(req.id, "\"mode\" must be a string");
    try {
      req.mode = parse_le_mode(m->get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw BadRequest(req.id, e.what());
    }
  }
  if (auto o = j.find("overrides"); o != j.end()) req.overrides = parse_overrides(*o, req.id);
  return req;
}

ScoreResponse handle_request(const ScoreRequest& req, const ServiceConfig& config) {
  try {
    if (req.op == ScoreOp::Shutdown) return error_response(req.id, "BAD_REQUEST", "shutdown is not a scoring op");
    if (req.op == ScoreOp::BleuPair) {
      ScoreResponse r;
      r.id = req.id;
      r.bleu = corpus_bleu({EvalPair{req.id, req.prediction, req.reference}}, config.bleu);
      r.score = std::clamp(*r.bleu / 100.0, 0.0, 1.0);
      return r;
    }

    LeConfig le;
    try {
      le = effective_config(req, config);
      parse(req.reference);
    } catch (const std::exception& e) {
      return error_response(req.id, "BAD_REQUEST", e.what());
    }
    ScoreResponse r;
    r.id = req.id;
    try {
      LeReport report = le_score(req.prediction, req.reference, req.mode.value_or(config.mode), le);
      r.score = std::clamp(report.score, 0.0, 1.0);
      r.report = std::move(report);
    } catch (const ParseError& e) {
      r.score = 0.0;
      r.warning = std::string("prediction did not parse: ") + e.what();
    }
    return r;
  } catch (const CapExceeded& e) {
    return error_response(req.id, "CAP_EXCEEDED", e.what());
  } catch (const std::exception& e) {
    return error_response(req.id, "INTERNAL", e.what());
  }
}

std::optional<ScoreResponse> handle_line(std::string_view line, const ServiceConfig& config) {
  try {
    ScoreRequest req = parse_request(line);
    if (req.op == ScoreOp::Shutdown) return std::nullopt;
    return handle_request(req, config);
  } catch (const BadRequest& e) {
    return error_response(e.id(), "BAD_REQUEST", e.what());
  }
}

std::string response_to_json(const ScoreResponse& resp) {
  ordered_json j;
  j["id"] = resp.id;
  j["score"] = resp.score ? ordered_json(*resp.score) : ordered_json(nullptr);
  if (resp.report) {
    j["detail"] = report_detail(*resp.report);
  } else if (resp.warning) {
    j["detail"] = ordered_json{{"warning", *resp.warning}};
  } else if (resp.bleu) {
    j["detail"] = ordered_json{{"bleu", *resp.bleu}};
  } else {
    j["detail"] = nullptr;
  }
  if (resp.error) {
    j["error"] = ordered_json{{"code", resp.error->code}, {"message", resp.error->message}};
  } else {
    j["error"] = nullptr;
  }
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::size_t serve(std::istream& in, std::ostream& out, const ServiceConfig& config) {
  auto next = [&](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
  auto emit = [&](const std::string& text) { out << text << '\n' << std::flush; };
  return serve_lines(next, emit, config).responses;
}

void serve_unix_socket(const std::filesystem::path& socket_path, const ServiceConfig& config) {
  sockaddr_un addr{};
  const std::string path = socket_path.string();
  if (path.size() >= sizeof addr.sun_path) throw std::invalid_argument("socket path too long: " + path);
  addr.sun_family = AF_UNIX;
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);

  FdGuard listener{::socket(AF_UNIX, SOCK_STREAM, 0)};
  if (listener.fd < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  ::unlink(path.c_str());
  if (::bind(listener.fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    throw std::runtime_error("bind " + path + ": " + std::strerror(errno));
  }
  if (::listen(listener.fd, 16) != 0) throw std::runtime_error(std::string("listen: ") + std::strerror(errno));

  bool shutdown = false;
  while (!shutdown) {
    const int conn = ::accept(listener.fd, nullptr, nullptr);
    if (conn < 0) {
      if (errno == EINTR) continue;
      ::unlink(path.c_str());
      throw std::runtime_error(std::string("accept: ") + std::strerror(errno));
    }
    FdGuard guard{conn};
    FdReader reader(conn);
    auto next = [&](std::string& line) { return reader.next(line); };
    auto emit = [&](const std::string& text) { write_all(conn, text + '\n'); };
    shutdown = serve_lines(next, emit, config).shutdown;
  }
  ::unlink(path.c_str());
}

}  // namespace folreward
