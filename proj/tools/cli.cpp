#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "folreward/corpus.hpp"
#include "folreward/errors.hpp"
#include "folreward/le_metric.hpp"
#include "folreward/service.hpp"
#include "folreward/sgrpo.hpp"
#include "folreward/syntax.hpp"
#include "json.hpp"

namespace folreward::cli {
namespace {

// Thrown for bad input data (as opposed to bad command line usage).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_real(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, ec == std::errc() ? ptr : buf);
  if (s.find_first_of(".eni") == std::string::npos) s += ".0";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

void print_tree(const FolExpr& e, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  if (const auto* a = e.as<FolExpr::Atom>()) {
    out << pad << atom_text(*a) << '\n';
  } else if (const auto* n = e.as<FolExpr::Not>()) {
    out << pad << "not\n";
    print_tree(n->body, out, indent + 1);
  } else if (const auto* b = e.as<FolExpr::Binary>()) {
    static constexpr const char* names[] = {"and", "or", "implies", "iff", "xor"};
    out << pad << names[static_cast<int>(b->op)] << '\n';
    print_tree(b->left, out, indent + 1);
    print_tree(b->right, out, indent + 1);
  } else if (const auto* q = e.as<FolExpr::Quantified>()) {
    out << pad << (q->quantifier == Quantifier::Forall ? "forall " : "exists ") << q->variable << '\n';
    print_tree(q->body, out, indent + 1);
  }
}

struct ScoreArgs {
  std::vector<std::string> pair;
  std::string pred_file;
  std::string ref_file;
  std::string pairs_file;
  std::string format = "jsonl";
  std::string mode;
  std::optional<double> threshold;
  std::optional<std::size_t> chunk_size;
  std::optional<std::size_t> max_atoms;
  std::string out;
  std::string config;
  unsigned threads = 1;
};

nlohmann::ordered_json pair_json(const ScoredPair& p) {
  nlohmann::ordered_json j;
  j["id"] = p.id;
  j["score"] = p.report.score;
  j["mode"] = to_string(p.report.mode);
  j["atom_count"] = p.report.atom_count;
  j["assignments_evaluated"] = p.report.assignments_evaluated;
  j["bindings_explored"] = p.report.bindings_explored;
  j["trees_explored"] = p.report.trees_explored;
  j["truncated"] = p.report.truncated;
  j["fell_back"] = p.report.fell_back;
  j["error"] = nullptr;
  return j;
}

int run_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const int sources = (a.pair.empty() ? 0 : 1) + (a.pairs_file.empty() ? 0 : 1) +
                      (a.pred_file.empty() && a.ref_file.empty() ? 0 : 1);
  if (sources != 1) {
    err << "score: give exactly one of PRED REF, --pairs FILE, or --pred-file/--ref-file\n";
    return 1;
  }
  if (!a.pair.empty() && a.pair.size() != 2) {
    err << "score: expected PRED and REF\n";
    return 1;
  }
  if (a.pred_file.empty() != a.ref_file.empty()) {
    err << "score: --pred-file and --ref-file go together\n";
    return 1;
  }

  ServiceConfig base = a.config.empty() ? ServiceConfig{} : load_service_config(a.config);
  CorpusOptions opts;
  opts.le = base.le;
  opts.bleu = base.bleu;
  opts.threads = a.threads;
  LeMode mode = a.mode.empty() ? base.mode : parse_le_mode(a.mode);
  if (a.threshold) opts.le.similarity.threshold = *a.threshold;
  if (a.chunk_size) opts.le.chunk_size = *a.chunk_size;
  if (a.max_atoms) opts.le.limits.max_atoms = *a.max_atoms;
  opts.le.similarity.validate();

  std::vector<EvalPair> pairs;
  if (!a.pair.empty()) {
    pairs.push_back(EvalPair{"0", a.pair[0], a.pair[1]});
  } else if (!a.pairs_file.empty()) {
    LoadResult loaded = parse_pairs(read_file(a.pairs_file), parse_pair_format(a.format));
    for (const auto& bad : loaded.malformed) err << a.pairs_file << ":" << bad.line << ": " << bad.message << '\n';
    pairs = std::move(loaded.pairs);
  } else {
    const auto preds = read_lines(a.pred_file);
    const auto refs = read_lines(a.ref_file);
    if (preds.size() != refs.size()) {
      throw DataError("prediction and reference files differ in line count (" + std::to_string(preds.size()) +
                      " vs " + std::to_string(refs.size()) + ")");
    }
    for (std::size_t i = 0; i < preds.size(); ++i) pairs.push_back(EvalPair{std::to_string(i), preds[i], refs[i]});
  }
  if (pairs.empty()) throw DataError("no pairs to score");

  const CorpusReport report = corpus_le(pairs, mode, opts);
  for (const auto& f : report.failures) err << "pair " << f.id << ": " << f.error << '\n';

  if (!a.out.empty()) {
    std::ofstream o(a.out, std::ios::binary);
    if (!o) throw DataError("cannot write " + a.out);
    for (const auto& p : report.per_pair) o << pair_json(p).dump() << '\n';
    for (const auto& f : report.failures) {
      nlohmann::ordered_json j;
      j["id"] = f.id;
      j["score"] = 0.0;
      j["error"] = f.error;
      o << j.dump() << '\n';
    }
  }
  out << "mean_le " << format_real(report.mean_le) << '\n';
  out << "bleu " << format_real(report.bleu) << '\n';
  out << "pairs " << pairs.size() << '\n';
  out << "failures " << report.failures.size() << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Logic-equivalence scoring for first-order formulas", "folreward"};
  app.require_subcommand(1);

  auto* parse_cmd = app.add_subcommand("parse", "Parse a formula and print its tree");
  std::string formula;
  bool ascii = false;
  bool canonical = false;
  bool strict = false;
  parse_cmd->add_option("formula", formula, "Formula text")->required();
  parse_cmd->add_flag("--ascii", ascii, "Render with ASCII connectives");
  parse_cmd->add_flag("--canonical", canonical, "Rename bound variables to v1, v2, ...");
  parse_cmd->add_flag("--strict", strict, "Require every connective chain to be parenthesized");

  auto* score_cmd = app.add_subcommand("score", "Score prediction/reference pairs");
  ScoreArgs sa;
  score_cmd->add_option("pair", sa.pair, "PRED REF")->expected(0, 2);
  score_cmd->add_option("--pred-file", sa.pred_file, "One prediction per line");
  score_cmd->add_option("--ref-file", sa.ref_file, "One reference per line");
  score_cmd->add_option("--pairs", sa.pairs_file, "Pairs file (see --format)");
  score_cmd->add_option("--format", sa.format, "Pairs file format")->check(CLI::IsMember({"jsonl", "tsv"}));
  score_cmd->add_option("--mode", sa.mode, "Binding mode")->check(CLI::IsMember({"original", "optimized"}));
  score_cmd->add_option("--threshold", sa.threshold, "Similarity threshold");
  score_cmd->add_option("--chunk-size", sa.chunk_size, "Operands per bracketing chunk");
  score_cmd->add_option("--max-atoms", sa.max_atoms, "Atom limit for truth tables");
  score_cmd->add_option("--out", sa.out, "Write per-pair jsonl here");
  score_cmd->add_option("--config", sa.config, "key = value config file");
  score_cmd->add_option("--threads", sa.threads, "Scoring threads (0 = all cores)");

  auto* serve_cmd = app.add_subcommand("serve", "Serve newline-delimited JSON scoring requests");
  std::string socket_path;
  bool use_stdio = false;
  std::string serve_config;
  std::optional<unsigned> workers;
  auto* sock_opt = serve_cmd->add_option("--socket", socket_path, "Unix socket path");
  auto* stdio_opt = serve_cmd->add_flag("--stdio", use_stdio, "Serve on standard input/output");
  sock_opt->excludes(stdio_opt);
  serve_cmd->add_option("--config", serve_config, "key = value config file");
  serve_cmd->add_option("--workers", workers, "Concurrent request workers");

  auto* train_cmd = app.add_subcommand("train-demo", "Run the toy policy-optimization demo");
  std::string train_config;
  std::string trace_path;
  std::optional<std::size_t> iterations;
  train_cmd->add_option("--config", train_config, "JSON training config");
  train_cmd->add_option("--trace", trace_path, "Write the jsonl trace here (default stdout)");
  train_cmd->add_option("--iterations", iterations, "Override the iteration count");

  std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*parse_cmd) {
      const FolExpr e = parse(formula, strict ? ParseMode::FullyParenthesized : ParseMode::Precedence);
      const FolExpr shown = canonical ? canonicalize(e) : e;
      out << render(shown, ascii ? RenderStyle::Ascii : RenderStyle::Unicode) << '\n';
      print_tree(shown, out, 0);
      return 0;
    }
    if (*score_cmd) return run_score(sa, out, err);
    if (*serve_cmd) {
      if (socket_path.empty() && !use_stdio) {
        err << "serve: give --socket PATH or --stdio\n";
        return 1;
      }
      ServiceConfig cfg = serve_config.empty() ? ServiceConfig{} : load_service_config(serve_config);
      if (workers) cfg.workers = *workers;
      if (use_stdio) {
        serve(in, out, cfg);
      } else {
        serve_unix_socket(socket_path, cfg);
      }
      return 0;
    }
    if (*train_cmd) {
      sgrpo::TrainConfig cfg =
          train_config.empty() ? sgrpo::default_train_config() : sgrpo::load_train_config(read_file(train_config));
      if (iterations) cfg.iterations = *iterations;
      const auto trace = sgrpo::train_demo(cfg);
      if (trace_path.empty()) {
        sgrpo::write_trace_jsonl(trace, out);
      } else {
        std::ofstream o(trace_path, std::ios::binary);
        if (!o) throw DataError("cannot write " + trace_path);
        sgrpo::write_trace_jsonl(trace, o);
        if (!trace.rows.empty()) {
          out << "first_mean_reward " << format_real(trace.rows.front().mean_reward) << '\n';
          out << "last_mean_reward " << format_real(trace.rows.back().mean_reward) << '\n';
        }
      }
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace folreward::cli
