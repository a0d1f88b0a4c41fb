#include "folreward/le_metric.hpp"

namespace folreward {

LeReport le_score(std::string_view prediction, std::string_view reference, LeMode mode, const LeConfig& config) {
  const FolExpr ref = canonicalize(parse(reference, ParseMode::Precedence));

  BracketingOptions options;
  options.chunk_size = config.chunk_size;
  options.max_chain_operators = config.max_chain_operators;
  options.max_trees = config.max_trees;
  const BracketingResult trees = enumerate_parses(prediction, options);

  LeReport report;
  report.mode = mode;
  report.truncated = trees.truncated;
  bool have_best = false;
  for (const auto& tree : trees.trees) {
    const FolExpr pred = canonicalize(tree);
    BindingResult r;
    if (report.mode == LeMode::Original) {
      try {
        r = bind_original(pred, ref, config.limits);
      } catch (const CapExceeded& e) {
        if (e.which() != CapExceeded::Which::FactorialAtoms || !config.fallback_to_optimized) throw;
        report.mode = LeMode::Optimized;
        report.fell_back = true;
        r = bind_optimized(pred, ref, config);
      }
    } else {
      r = bind_optimized(pred, ref, config);
    }
    ++report.trees_explored;
    report.bindings_explored += r.bindings_explored;
    report.assignments_evaluated += r.assignments_evaluated;
    report.truncated = report.truncated || r.truncated;
    if (!have_best || r.score > report.score) {
      have_best = true;
      report.score = r.score;
      report.binding = std::move(r.binding);
      report.atom_count = r.atom_count;
    }
  }
  return report;
}

}  // namespace folreward
