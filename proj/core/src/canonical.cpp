#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

#include "folreward/syntax.hpp"

namespace folreward {
namespace {

void collect_free(const FolExpr& e, std::vector<std::string>& bound, std::set<std::string>& free) {
  if (const auto* a = e.as<FolExpr::Atom>()) {
    for (const auto& arg : a->args) {
      if (std::find(bound.begin(), bound.end(), arg) == bound.end()) free.insert(arg);
    }
  } else if (const auto* n = e.as<FolExpr::Not>()) {
    collect_free(n->body, bound, free);
  } else if (const auto* q = e.as<FolExpr::Quantified>()) {
    bound.push_back(q->variable);
    collect_free(q->body, bound, free);
    bound.pop_back();
  } else {
    const auto& b = std::get<FolExpr::Binary>(e.node());
    collect_free(b.left, bound, free);
    collect_free(b.right, bound, free);
  }
}

class Renamer {
 public:
  explicit Renamer(std::set<std::string> reserved) : reserved_(std::move(reserved)) {}

  FolExpr run(const FolExpr& e) {
    if (const auto* a = e.as<FolExpr::Atom>()) {
      std::vector<std::string> args;
      args.reserve(a->args.size());
      for (const auto& arg : a->args) args.push_back(lookup(arg));
      return FolExpr::atom(a->predicate, std::move(args));
    }
    if (const auto* n = e.as<FolExpr::Not>()) return FolExpr::negation(run(n->body));
    if (const auto* q = e.as<FolExpr::Quantified>()) {
      std::string fresh = next_name();
      scope_.emplace_back(q->variable, fresh);
      FolExpr body = run(q->body);
      scope_.pop_back();
      return FolExpr::quantified(q->quantifier, std::move(fresh), std::move(body));
    }
    const auto& b = std::get<FolExpr::Binary>(e.node());
    FolExpr left = run(b.left);
    return FolExpr::binary(b.op, std::move(left), run(b.right));
  }

 private:
  std::string lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    return name;
  }

  std::string next_name() {
    for (;;) {
      std::string candidate = "v" + std::to_string(++counter_);
      if (!reserved_.count(candidate)) return candidate;
    }
  }

  std::set<std::string> reserved_;
  std::vector<std::pair<std::string, std::string>> scope_;
  unsigned counter_ = 0;
};

void collect_atoms(const FolExpr& e, std::vector<AtomicUnit>& out, std::unordered_set<std::string>& seen) {
  if (const auto* a = e.as<FolExpr::Atom>()) {
    std::string text = atom_text(*a);
    if (seen.insert(text).second) out.push_back(AtomicUnit{a->predicate, a->args, std::move(text)});
  } else if (const auto* n = e.as<FolExpr::Not>()) {
    collect_atoms(n->body, out, seen);
  } else if (const auto* q = e.as<FolExpr::Quantified>()) {
    collect_atoms(q->body, out, seen);
  } else {
    const auto& b = std::get<FolExpr::Binary>(e.node());
    collect_atoms(b.left, out, seen);
    collect_atoms(b.right, out, seen);
  }
}

}  // namespace

FolExpr canonicalize(const FolExpr& expr) {
  std::vector<std::string> bound;
  std::set<std::string> free;
  collect_free(expr, bound, free);
  return Renamer(std::move(free)).run(expr);
}

std::string atom_text(const FolExpr::Atom& atom) {
  if (atom.args.empty()) return atom.predicate;
  std::string out = atom.predicate;
  out += '(';
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i) out += ',';
    out += atom.args[i];
  }
  out += ')';
  return out;
}

std::vector<AtomicUnit> atoms_of(const FolExpr& expr) {
  std::vector<AtomicUnit> out;
  std::unordered_set<std::string> seen;
  collect_atoms(expr, out, seen);
  return out;
}

FolExpr strip_quantifiers(const FolExpr& expr) {
  if (expr.as<FolExpr::Atom>()) return expr;
  if (const auto* n = expr.as<FolExpr::Not>()) return FolExpr::negation(strip_quantifiers(n->body));
  if (const auto* q = expr.as<FolExpr::Quantified>()) return strip_quantifiers(q->body);
  const auto& b = std::get<FolExpr::Binary>(expr.node());
  return FolExpr::binary(b.op, strip_quantifiers(b.left), strip_quantifiers(b.right));
}

}  // namespace folreward
