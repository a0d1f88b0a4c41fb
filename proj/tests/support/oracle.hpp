#pragma once

// Straight-line reference implementations used to check the library. They
// share no code with core/src beyond the public syntax tree types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "folreward/syntax.hpp"

namespace oracle {

using folreward::BinaryOp;
using folreward::FolExpr;
using folreward::Quantifier;

// ---------------------------------------------------------------- formulas

struct FormulaGen {
  std::mt19937_64 rng;
  std::vector<std::string> predicates{"Human", "Mortal", "Animal", "Plant", "Green", "Tall", "Wise", "Red"};
  std::vector<std::string> terms{"x", "y", "a", "b"};

  explicit FormulaGen(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  FolExpr atom() {
    const std::size_t arity = pick(3);  // 0, 1 or 2 arguments
    std::vector<std::string> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(terms[pick(terms.size())]);
    return FolExpr::atom(predicates[pick(predicates.size())], args);
  }

  // At most `atoms` atom occurrences and nesting depth `depth`.
  FolExpr formula(std::size_t atoms, std::size_t depth) {
    if (atoms <= 1 || depth <= 1) return depth > 1 && pick(4) == 0 ? FolExpr::negation(atom()) : atom();
    switch (pick(6)) {
      case 0:
        return FolExpr::negation(formula(atoms, depth - 1));
      case 1:
        return FolExpr::quantified(pick(2) ? Quantifier::Forall : Quantifier::Exists, pick(2) ? "x" : "y",
                                   formula(atoms, depth - 1));
      default: {
        const std::size_t left = 1 + pick(atoms - 1);
        static constexpr BinaryOp ops[] = {BinaryOp::And, BinaryOp::Or, BinaryOp::Implies, BinaryOp::Iff,
                                           BinaryOp::Xor};
        return FolExpr::binary(ops[pick(5)], formula(left, depth - 1), formula(atoms - left, depth - 1));
      }
    }
  }
};

// ------------------------------------------------------------ truth tables

inline std::string atom_key(const FolExpr::Atom& a) {
  std::string s = a.predicate;
  if (a.args.empty()) return s;
  s += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) s += (i ? "," : "") + a.args[i];
  return s + ')';
}

inline void collect(const FolExpr& e, std::vector<std::string>& out) {
  if (const auto* a = e.as<FolExpr::Atom>()) {
    const auto k = atom_key(*a);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  } else if (const auto* n = e.as<FolExpr::Not>()) {
    collect(n->body, out);
  } else if (const auto* q = e.as<FolExpr::Quantified>()) {
    collect(q->body, out);
  } else {
    const auto& b = *e.as<FolExpr::Binary>();
    collect(b.left, out);
    collect(b.right, out);
  }
}

inline std::vector<std::string> atoms(const FolExpr& e) {
  std::vector<std::string> out;
  collect(e, out);
  return out;
}

inline bool eval(const FolExpr& e, const std::function<bool(const std::string&)>& value) {
  if (const auto* a = e.as<FolExpr::Atom>()) return value(atom_key(*a));
  if (const auto* n = e.as<FolExpr::Not>()) return !eval(n->body, value);
  if (const auto* q = e.as<FolExpr::Quantified>()) return eval(q->body, value);
  const auto& b = *e.as<FolExpr::Binary>();
  const bool l = eval(b.left, value);
  const bool r = eval(b.right, value);
  switch (b.op) {
    case BinaryOp::And: return l && r;
    case BinaryOp::Or: return l || r;
    case BinaryOp::Implies: return !l || r;
    case BinaryOp::Iff: return l == r;
    case BinaryOp::Xor: return l != r;
  }
  return false;
}

// Fraction of assignments on which pred and ref agree; `binding` maps
// prediction atom text to reference atom text. Unbound prediction atoms are
// fresh variables even when their text matches a reference atom.
inline double agreement(const FolExpr& pred, const FolExpr& ref, const std::map<std::string, std::string>& binding) {
  std::vector<std::string> vars = atoms(ref);
  std::map<std::string, std::string> pred_var;
  for (const auto& p : atoms(pred)) {
    auto it = binding.find(p);
    if (it != binding.end()) {
      pred_var[p] = it->second;
    } else {
      pred_var[p] = "\x01" + p;
      vars.push_back("\x01" + p);
    }
  }
  const std::size_t n = vars.size();
  std::size_t agree = 0;
  for (std::uint64_t row = 0; row < (std::uint64_t{1} << n); ++row) {
    std::map<std::string, bool> v;
    for (std::size_t i = 0; i < n; ++i) v[vars[i]] = (row >> i) & 1;
    const bool p = eval(pred, [&](const std::string& k) { return v.at(pred_var.at(k)); });
    const bool r = eval(ref, [&](const std::string& k) { return v.at(k); });
    agree += p == r;
  }
  return static_cast<double>(agree) / static_cast<double>(std::uint64_t{1} << n);
}

// ----------------------------------------------------------------- binding

inline std::size_t edit_distance(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

inline std::u32string widen_ascii(const std::string& s) { return std::u32string(s.begin(), s.end()); }

struct BindingCandidate {
  std::map<std::string, std::string> binding;
  double score = 0.0;
  std::size_t distance = 0;
};

// Every injective matching that binds all atoms of the smaller side, with its
// score and summed edit distance. Atom names in tests are ASCII.
inline std::vector<BindingCandidate> all_complete_matchings(const FolExpr& pred, const FolExpr& ref) {
  const auto pa = atoms(pred);
  const auto ra = atoms(ref);
  std::vector<BindingCandidate> out;
  const bool pred_smaller = pa.size() <= ra.size();
  const auto& small = pred_smaller ? pa : ra;
  const auto& large = pred_smaller ? ra : pa;
  std::vector<std::size_t> perm(large.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::set<std::vector<std::size_t>> seen;
  do {
    std::vector<std::size_t> head(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(small.size()));
    if (!seen.insert(head).second) continue;
    BindingCandidate c;
    for (std::size_t i = 0; i < small.size(); ++i) {
      const auto& p = pred_smaller ? small[i] : large[head[i]];
      const auto& r = pred_smaller ? large[head[i]] : small[i];
      c.binding[p] = r;
      c.distance += edit_distance(widen_ascii(p), widen_ascii(r));
    }
    c.score = agreement(pred, ref, c.binding);
    out.push_back(std::move(c));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

// Optimal (score desc, distance asc) candidates; all ties are returned.
inline std::vector<BindingCandidate> best_matchings(const FolExpr& pred, const FolExpr& ref) {
  auto all = all_complete_matchings(pred, ref);
  double best_score = -1.0;
  std::size_t best_dist = 0;
  for (const auto& c : all) {
    if (c.score > best_score || (c.score == best_score && c.distance < best_dist)) {
      best_score = c.score;
      best_dist = c.distance;
    }
  }
  std::vector<BindingCandidate> out;
  for (auto& c : all) {
    if (c.score == best_score && c.distance == best_dist) out.push_back(std::move(c));
  }
  return out;
}

// -------------------------------------------------------------- bracketing

// Number of distinct full binary trees over k + 1 leaves, by explicit
// construction of bracket strings.
inline std::set<std::string> bracket_strings(std::size_t lo, std::size_t hi) {
  if (lo == hi) return {std::to_string(lo)};
  std::set<std::string> out;
  for (std::size_t split = lo; split < hi; ++split) {
    for (const auto& l : bracket_strings(lo, split)) {
      for (const auto& r : bracket_strings(split + 1, hi)) out.insert("(" + l + " " + r + ")");
    }
  }
  return out;
}

// -------------------------------------------------------------------- BLEU

inline double bleu(const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& corpus) {
  double match[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  double c = 0;
  double r = 0;
  for (const auto& [hyp, ref] : corpus) {
    c += static_cast<double>(hyp.size());
    r += static_cast<double>(ref.size());
    for (std::size_t n = 1; n <= 4; ++n) {
      std::map<std::vector<std::string>, int> hc;
      std::map<std::vector<std::string>, int> rc;
      for (std::size_t i = 0; i + n <= hyp.size(); ++i) hc[{hyp.begin() + i, hyp.begin() + i + n}]++;
      for (std::size_t i = 0; i + n <= ref.size(); ++i) rc[{ref.begin() + i, ref.begin() + i + n}]++;
      for (const auto& [g, k] : hc) match[n - 1] += std::min(k, rc[g]);
      if (hyp.size() >= n) total[n - 1] += static_cast<double>(hyp.size() - n + 1);
    }
  }
  double logp = 0;
  for (int n = 0; n < 4; ++n) {
    if (match[n] == 0 || total[n] == 0) return 0.0;
    logp += std::log(match[n] / total[n]) / 4.0;
  }
  const double bp = c < r ? std::exp(1 - r / c) : 1.0;
  return 100.0 * bp * std::exp(logp);
}

}  // namespace oracle
