// Bracketing enumeration over flat connective chains.
//
// A chain of n operands joined by n-1 binary connectives has Catalan(n-1)
// binary trees. Full mode enumerates all of them. Chunked mode splits the
// operand chain into consecutive chunks of `m` operands, enumerates every
// bracketing inside each chunk while the other chunks keep their precedence
// bracketing, then treats the chunk roots as a new, shorter chain and
// enumerates that one the same way (recursively chunked when it is still
// longer than m). The precedence parse is always part of the result.

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "folreward/syntax.hpp"
#include "surface.hpp"

namespace folreward {
namespace {

struct Shape;
using ShapePtr = std::shared_ptr<const Shape>;

// Binary tree over the operand index range [lo, hi).
struct Shape {
  std::size_t lo = 0;
  std::size_t hi = 0;
  ShapePtr left;
  ShapePtr right;

  bool leaf() const { return hi - lo == 1; }
};

ShapePtr make_leaf(std::size_t i) { return std::make_shared<const Shape>(Shape{i, i + 1, nullptr, nullptr}); }

ShapePtr make_node(ShapePtr l, ShapePtr r) {
  const std::size_t lo = l->lo;
  const std::size_t hi = r->hi;
  return std::make_shared<const Shape>(Shape{lo, hi, std::move(l), std::move(r)});
}

void shape_key(const Shape& s, std::string& out) {
  if (s.leaf()) {
    out += std::to_string(s.lo);
    return;
  }
  out += '(';
  shape_key(*s.left, out);
  out += ' ';
  shape_key(*s.right, out);
  out += ')';
}

std::string shape_key(const Shape& s) {
  std::string out;
  shape_key(s, out);
  return out;
}

// Calls `emit` for every binary tree over [lo, hi); stops early when it
// returns false.
bool each_shape(std::size_t lo, std::size_t hi, const std::function<bool(ShapePtr)>& emit) {
  if (hi - lo == 1) return emit(make_leaf(lo));
  for (std::size_t split = lo + 1; split < hi; ++split) {
    const bool more = each_shape(lo, split, [&](ShapePtr l) {
      return each_shape(split, hi, [&](ShapePtr r) { return emit(make_node(l, r)); });
    });
    if (!more) return false;
  }
  return true;
}

// Precedence-climbing tree over [lo, hi); ops[i] joins operands i and i+1.
ShapePtr precedence_shape(std::size_t lo, std::size_t hi, const std::vector<BinaryOp>& ops) {
  std::size_t next = lo;  // operator index
  std::function<ShapePtr(std::size_t, int)> climb = [&](std::size_t index, int min_prec) {
    ShapePtr lhs = make_leaf(index);
    while (next + 1 < hi && precedence(ops[next]) >= min_prec) {
      const BinaryOp op = ops[next];
      const std::size_t rhs_index = ++next;
      const int next_min = is_right_associative(op) ? precedence(op) : precedence(op) + 1;
      lhs = make_node(lhs, climb(rhs_index, next_min));
    }
    return lhs;
  };
  return climb(lo, 0);
}

// Replaces leaf j of `root` (a shape over chunk indices) by chunks[j].
ShapePtr compose(const ShapePtr& root, const std::vector<ShapePtr>& chunks) {
  if (root->leaf()) return chunks[root->lo];
  return make_node(compose(root->left, chunks), compose(root->right, chunks));
}

class ShapeSet {
 public:
  explicit ShapeSet(std::size_t cap) : cap_(cap) {}

  bool add(ShapePtr s) {
    if (shapes_.size() >= cap_) {
      truncated_ = true;
      return false;
    }
    if (seen_.insert(shape_key(*s)).second) shapes_.push_back(std::move(s));
    return true;
  }

  std::vector<ShapePtr>& shapes() { return shapes_; }
  bool truncated() const { return truncated_; }

 private:
  std::size_t cap_;
  std::vector<ShapePtr> shapes_;
  std::unordered_set<std::string> seen_;
  bool truncated_ = false;
};

void full_shapes(std::size_t n, const std::vector<BinaryOp>& ops, ShapeSet& out) {
  if (!out.add(precedence_shape(0, n, ops))) return;
  each_shape(0, n, [&](ShapePtr s) { return out.add(std::move(s)); });
}

void chunked_shapes(std::size_t n, const std::vector<BinaryOp>& ops, std::size_t m, ShapeSet& out) {
  if (n <= m) {
    full_shapes(n, ops, out);
    return;
  }
  if (!out.add(precedence_shape(0, n, ops))) return;

  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (std::size_t lo = 0; lo < n; lo += m) ranges.emplace_back(lo, std::min(lo + m, n));

  std::vector<ShapePtr> base;
  std::vector<BinaryOp> root_ops;
  for (std::size_t j = 0; j < ranges.size(); ++j) {
    base.push_back(precedence_shape(ranges[j].first, ranges[j].second, ops));
    if (j + 1 < ranges.size()) root_ops.push_back(ops[ranges[j].second - 1]);
  }

  ShapeSet roots(std::numeric_limits<std::size_t>::max());
  chunked_shapes(ranges.size(), root_ops, m, roots);
  const ShapePtr root_base = roots.shapes().front();

  for (std::size_t j = 0; j < ranges.size(); ++j) {
    std::vector<ShapePtr> chunks = base;
    const bool more = each_shape(ranges[j].first, ranges[j].second, [&](ShapePtr s) {
      chunks[j] = std::move(s);
      return out.add(compose(root_base, chunks));
    });
    if (!more) return;
  }
  for (const auto& r : roots.shapes()) {
    if (!out.add(compose(r, base))) return;
  }
}

FolExpr build(const Shape& s, const std::vector<FolExpr>& operands, const std::vector<BinaryOp>& ops) {
  if (s.leaf()) return operands[s.lo];
  return FolExpr::binary(ops[s.left->hi - 1], build(*s.left, operands, ops), build(*s.right, operands, ops));
}

std::vector<ShapePtr> chain_shapes(const std::vector<BinaryOp>& ops, const BracketingOptions& options,
                                   bool& truncated) {
  if (ops.size() > options.max_chain_operators) {
    throw CapExceeded(CapExceeded::Which::ChainLength, options.max_chain_operators, ops.size());
  }
  const std::size_t n = ops.size() + 1;
  ShapeSet set(options.max_trees);
  if (options.chunk_size) {
    chunked_shapes(n, ops, *options.chunk_size, set);
  } else {
    full_shapes(n, ops, set);
  }
  truncated = truncated || set.truncated();
  return std::move(set.shapes());
}

class TreeSet {
 public:
  explicit TreeSet(std::size_t cap) : cap_(cap) {}

  bool add(FolExpr e) {
    if (trees_.size() >= cap_) {
      truncated_ = true;
      return false;
    }
    if (seen_.insert(render(e, RenderStyle::Ascii)).second) trees_.push_back(std::move(e));
    return true;
  }

  std::vector<FolExpr>& trees() { return trees_; }
  bool truncated() const { return truncated_; }

 private:
  std::size_t cap_;
  std::vector<FolExpr> trees_;
  std::unordered_set<std::string> seen_;
  bool truncated_ = false;
};

std::vector<FolExpr> alternatives(const detail::Surface& s, const BracketingOptions& options, bool& truncated) {
  using Kind = detail::Surface::Kind;
  switch (s.kind) {
    case Kind::Atom:
      return {FolExpr::atom(s.atom.predicate, s.atom.args)};
    case Kind::Not: {
      auto inner = alternatives(*s.operands.front(), options, truncated);
      std::vector<FolExpr> out;
      out.reserve(inner.size());
      for (auto& e : inner) out.push_back(FolExpr::negation(std::move(e)));
      return out;
    }
    case Kind::Quantified: {
      auto inner = alternatives(*s.operands.front(), options, truncated);
      std::vector<FolExpr> out;
      out.reserve(inner.size());
      for (auto& e : inner) out.push_back(FolExpr::quantified(s.quantifier, s.variable, std::move(e)));
      return out;
    }
    case Kind::Chain:
      break;
  }

  std::vector<std::vector<FolExpr>> operand_alts;
  operand_alts.reserve(s.operands.size());
  for (const auto& o : s.operands) operand_alts.push_back(alternatives(*o, options, truncated));
  const auto shapes = chain_shapes(s.ops, options, truncated);

  TreeSet out(options.max_trees);
  std::vector<std::size_t> pick(operand_alts.size(), 0);
  std::vector<FolExpr> operands;
  for (const auto& shape : shapes) {
    std::fill(pick.begin(), pick.end(), 0);
    for (;;) {
      operands.clear();
      for (std::size_t i = 0; i < pick.size(); ++i) operands.push_back(operand_alts[i][pick[i]]);
      if (!out.add(build(*shape, operands, s.ops))) {
        truncated = true;
        return std::move(out.trees());
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == operand_alts[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }
  return std::move(out.trees());
}

}  // namespace

std::uint64_t catalan(unsigned n) {
  std::uint64_t c = 1;
  for (unsigned i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

BracketingResult enumerate_bracketings(const std::vector<Token>& tokens, const BracketingOptions& options) {
  if (options.chunk_size && *options.chunk_size < 2) {
    throw std::invalid_argument("chunk size must be at least 2");
  }
  const auto surface = detail::parse_surface(tokens, ParseMode::Precedence);
  BracketingResult result;
  if (surface->kind != detail::Surface::Kind::Chain) {
    result.trees.push_back(detail::resolve(*surface));
    result.explored = 1;
    return result;
  }
  std::vector<FolExpr> operands;
  for (const auto& o : surface->operands) operands.push_back(detail::resolve(*o));
  const auto shapes = chain_shapes(surface->ops, options, result.truncated);
  TreeSet set(std::numeric_limits<std::size_t>::max());
  for (const auto& shape : shapes) set.add(build(*shape, operands, surface->ops));
  result.trees = std::move(set.trees());
  result.explored = result.trees.size();
  return result;
}

BracketingResult enumerate_parses(std::string_view text, const BracketingOptions& options) {
  if (options.chunk_size && *options.chunk_size < 2) {
    throw std::invalid_argument("chunk size must be at least 2");
  }
  const auto surface = detail::parse_surface(tokenize(text), ParseMode::Precedence);
  BracketingResult result;
  result.trees = alternatives(*surface, options, result.truncated);
  result.explored = result.trees.size();
  return result;
}

}  // namespace folreward
