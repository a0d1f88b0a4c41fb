#pragma once

// First-order logic surface syntax: tokens, immutable syntax trees, parsing,
// rendering, canonical variable naming and bracketing enumeration.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "folreward/errors.hpp"

namespace folreward {

enum class TokenKind {
  Forall,
  Exists,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Xor,
  LParen,
  RParen,
  Comma,
  Identifier,
};

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t position;  // code point offset

  bool operator==(const Token&) const = default;
};

/// Splits UTF-8 formula text into tokens. Unicode (∀∃¬∧∨→↔⊕) and ASCII
/// (forall exists ~ & | -> <-> ^) spellings are both accepted.
std::vector<Token> tokenize(std::string_view text);

enum class Quantifier { Forall, Exists };
enum class BinaryOp { And, Or, Implies, Iff, Xor };

/// Binding strength used for precedence parsing; larger binds tighter.
int precedence(BinaryOp op) noexcept;
bool is_right_associative(BinaryOp op) noexcept;

/// Immutable first-order formula. Copies share structure.
class FolExpr {
 public:
  struct Atom {
    std::string predicate;
    std::vector<std::string> args;  // empty for a bare zero-arity identifier
  };
  struct Not;
  struct Binary;
  struct Quantified;
  using Node = std::variant<Atom, Not, Binary, Quantified>;

  static FolExpr atom(std::string predicate, std::vector<std::string> args = {});
  static FolExpr negation(FolExpr body);
  static FolExpr binary(BinaryOp op, FolExpr left, FolExpr right);
  static FolExpr quantified(Quantifier q, std::string variable, FolExpr body);

  const Node& node() const noexcept;

  template <typename T>
  const T* as() const noexcept;

  /// Structural equality.
  friend bool operator==(const FolExpr& a, const FolExpr& b);

  std::size_t size() const;  // number of nodes
  std::size_t depth() const;

 private:
  explicit FolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct FolExpr::Not {
  FolExpr body;
};
struct FolExpr::Binary {
  BinaryOp op;
  FolExpr left;
  FolExpr right;
};
struct FolExpr::Quantified {
  Quantifier quantifier;
  std::string variable;
  FolExpr body;
};

inline const FolExpr::Node& FolExpr::node() const noexcept { return *node_; }

template <typename T>
const T* FolExpr::as() const noexcept {
  return std::get_if<T>(node_.get());
}

enum class ParseMode {
  Precedence,
  /// Each connective chain may hold at most one binary connective; anything
  /// longer must be parenthesized.
  FullyParenthesized,
};

FolExpr parse(std::string_view text, ParseMode mode = ParseMode::Precedence);
FolExpr parse(const std::vector<Token>& tokens, ParseMode mode = ParseMode::Precedence);

enum class RenderStyle { Unicode, Ascii };

std::string render(const FolExpr& expr, RenderStyle style = RenderStyle::Unicode);

/// Bound variables become v1, v2, ... in quantifier order. Names that occur
/// free in the formula are skipped so renaming never captures them.
FolExpr canonicalize(const FolExpr& expr);

struct AtomicUnit {
  std::string predicate;
  std::vector<std::string> args;
  std::string canonical_text;  // "P(a,b)" or bare "P"

  friend bool operator==(const AtomicUnit& a, const AtomicUnit& b) {
    return a.canonical_text == b.canonical_text;
  }
};

std::string atom_text(const FolExpr::Atom& atom);

/// Distinct atomic formulas in first-occurrence (pre-order) order.
std::vector<AtomicUnit> atoms_of(const FolExpr& expr);

/// Removes the quantifier prefix at every level, leaving the connective
/// skeleton over atoms.
FolExpr strip_quantifiers(const FolExpr& expr);

struct BracketingOptions {
  /// Operands per chunk; nullopt enumerates every bracketing of a chain.
  std::optional<std::size_t> chunk_size;
  /// Longest connective chain accepted.
  std::size_t max_chain_operators = 16;
  /// Upper bound on returned trees; hitting it sets `truncated`.
  std::size_t max_trees = 4096;
};

struct BracketingResult {
  /// Precedence parse first, then the remaining distinct trees.
  std::vector<FolExpr> trees;
  /// Number of distinct trees explored (equals trees.size()).
  std::size_t explored = 0;
  bool truncated = false;
};

/// Alternative parse trees for a flat chain of operands joined by binary
/// connectives. Operands themselves are parsed by precedence.
BracketingResult enumerate_bracketings(const std::vector<Token>& tokens,
                                       const BracketingOptions& options = {});

/// Alternative trees for a whole formula: every connective chain at every
/// nesting level is re-bracketed and the combinations are enumerated.
BracketingResult enumerate_parses(std::string_view text,
                                  const BracketingOptions& options = {});

std::uint64_t catalan(unsigned n);

}  // namespace folreward
