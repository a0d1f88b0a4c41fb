#pragma once

// Logical-equivalence (LE) scoring between a predicted and a reference
// formula. Quantifier prefixes are stripped after canonical renaming, atoms
// become propositional variables, and the score is the fraction of truth
// assignments on which both skeletons agree, maximized over atom bindings.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "folreward/similarity.hpp"
#include "folreward/syntax.hpp"

namespace folreward {

enum class LeMode { Original, Optimized };

const char* to_string(LeMode mode) noexcept;
/// Accepts "original" and "optimized"; throws std::invalid_argument otherwise.
LeMode parse_le_mode(std::string_view text);

struct LeLimits {
  /// Distinct propositional variables allowed in one truth table.
  std::size_t max_atoms = 16;
  /// Largest atom set the exhaustive (factorial) binding search accepts.
  std::size_t max_factorial_atoms = 7;
  /// Assignments the candidate-restricted search may score before it stops.
  std::size_t component_cap = 10'000;
};

struct LeConfig {
  SimilarityConfig similarity;
  /// Replaces the character n-gram cosine when set.
  SimilarityFn similarity_fn;
  LeLimits limits;
  /// Operands per chunk for prediction bracketing; nullopt enumerates all.
  std::optional<std::size_t> chunk_size = 4;
  std::size_t max_chain_operators = 16;
  std::size_t max_trees = 4096;
  /// Original mode falls back to optimized instead of failing on the
  /// factorial cap.
  bool fallback_to_optimized = false;
};

/// Injective prediction-atom -> reference-atom correspondence.
struct BindingMap {
  std::vector<std::pair<AtomicUnit, AtomicUnit>> pairs;
  std::vector<AtomicUnit> unbound_prediction;
  std::vector<AtomicUnit> unbound_reference;

  /// Pairs atoms whose canonical text is equal.
  static BindingMap identity(const std::vector<AtomicUnit>& prediction, const std::vector<AtomicUnit>& reference);

  bool injective() const;
};

struct CandidateEdge {
  std::size_t prediction;  // index into the prediction atom list
  std::size_t reference;   // index into the reference atom list
  double similarity;
};

struct CandidateComponent {
  std::vector<std::size_t> prediction;
  std::vector<std::size_t> reference;
  std::vector<CandidateEdge> edges;

  /// True when some atom in the component has more than one candidate.
  bool one_to_many() const { return prediction.size() > 1 || reference.size() > 1; }
};

/// Bipartite graph of related atom pairs (similarity >= threshold) and its
/// connected components. Atoms without any edge are in no component.
struct CandidateGraph {
  std::vector<CandidateEdge> edges;
  std::vector<CandidateComponent> components;
};

CandidateGraph build_candidate_graph(const std::vector<AtomicUnit>& prediction,
                                     const std::vector<AtomicUnit>& reference, const LeConfig& config);

struct BindingResult {
  BindingMap binding;
  double score = 0.0;
  /// Summed edit distance of the bound pairs; the first tie-breaker.
  std::size_t total_distance = 0;
  std::size_t bindings_explored = 0;
  std::size_t assignments_evaluated = 0;
  /// Distinct propositional variables under the chosen binding.
  std::size_t atom_count = 0;
  bool truncated = false;
};

/// Truth-table agreement of two canonicalized formulas after rewriting
/// prediction atoms through `binding`. Throws CapExceeded above max_atoms.
double propositional_score(const FolExpr& prediction, const FolExpr& reference, const BindingMap& binding,
                           std::size_t max_atoms = LeLimits{}.max_atoms);

/// Exhaustive search over maximal injective matchings, candidates tried in
/// ascending edit distance. Best score wins; ties go to the smaller summed
/// distance, then to the first matching enumerated.
BindingResult bind_original(const FolExpr& prediction, const FolExpr& reference, const LeLimits& limits = {});

/// Candidate-restricted search: unique candidates are fixed, one-to-many
/// components are enumerated jointly, unrelated atoms stay unbound.
BindingResult bind_optimized(const FolExpr& prediction, const FolExpr& reference, const LeConfig& config = {});

struct LeReport {
  double score = 0.0;
  BindingMap binding;
  std::size_t atom_count = 0;
  std::size_t assignments_evaluated = 0;
  std::size_t bindings_explored = 0;
  std::size_t trees_explored = 0;
  LeMode mode = LeMode::Optimized;
  bool truncated = false;
  /// Original mode hit the factorial cap and ran the optimized search.
  bool fell_back = false;
};

/// Parses both texts (prediction bracketings enumerated, reference by
/// precedence) and returns the best score over trees and bindings.
LeReport le_score(std::string_view prediction, std::string_view reference, LeMode mode,
                  const LeConfig& config = {});

}  // namespace folreward
