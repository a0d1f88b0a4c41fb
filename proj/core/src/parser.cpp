#include <algorithm>
#include <functional>
#include <type_traits>

#include "folreward/syntax.hpp"
#include "surface.hpp"

namespace folreward {

int precedence(BinaryOp op) noexcept {
  switch (op) {
    case BinaryOp::And:
      return 4;
    case BinaryOp::Or:
      return 3;
    case BinaryOp::Implies:
      return 2;
    case BinaryOp::Iff:
    case BinaryOp::Xor:
      return 1;
  }
  return 0;
}

bool is_right_associative(BinaryOp op) noexcept { return op == BinaryOp::Implies; }

FolExpr FolExpr::atom(std::string predicate, std::vector<std::string> args) {
  return FolExpr(std::make_shared<const Node>(Atom{std::move(predicate), std::move(args)}));
}

FolExpr FolExpr::negation(FolExpr body) {
  return FolExpr(std::make_shared<const Node>(Not{std::move(body)}));
}

FolExpr FolExpr::binary(BinaryOp op, FolExpr left, FolExpr right) {
  return FolExpr(std::make_shared<const Node>(Binary{op, std::move(left), std::move(right)}));
}

FolExpr FolExpr::quantified(Quantifier q, std::string variable, FolExpr body) {
  return FolExpr(std::make_shared<const Node>(Quantified{q, std::move(variable), std::move(body)}));
}

bool operator==(const FolExpr& a, const FolExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->index() != b.node_->index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(*b.node_);
        if constexpr (std::is_same_v<T, FolExpr::Atom>) {
          return lhs.predicate == rhs.predicate && lhs.args == rhs.args;
        } else if constexpr (std::is_same_v<T, FolExpr::Not>) {
          return lhs.body == rhs.body;
        } else if constexpr (std::is_same_v<T, FolExpr::Binary>) {
          return lhs.op == rhs.op && lhs.left == rhs.left && lhs.right == rhs.right;
        } else {
          return lhs.quantifier == rhs.quantifier && lhs.variable == rhs.variable && lhs.body == rhs.body;
        }
      },
      *a.node_);
}

std::size_t FolExpr::size() const {
  if (as<Atom>()) return 1;
  if (const auto* n = as<Not>()) return 1 + n->body.size();
  if (const auto* q = as<Quantified>()) return 1 + q->body.size();
  const auto& b = std::get<Binary>(*node_);
  return 1 + b.left.size() + b.right.size();
}

std::size_t FolExpr::depth() const {
  if (as<Atom>()) return 1;
  if (const auto* n = as<Not>()) return 1 + n->body.depth();
  if (const auto* q = as<Quantified>()) return 1 + q->body.depth();
  const auto& b = std::get<Binary>(*node_);
  return 1 + std::max(b.left.depth(), b.right.depth());
}

namespace detail {
namespace {

std::optional<BinaryOp> binary_op(TokenKind kind) {
  switch (kind) {
    case TokenKind::And:
      return BinaryOp::And;
    case TokenKind::Or:
      return BinaryOp::Or;
    case TokenKind::Implies:
      return BinaryOp::Implies;
    case TokenKind::Iff:
      return BinaryOp::Iff;
    case TokenKind::Xor:
      return BinaryOp::Xor;
    default:
      return std::nullopt;
  }
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  return n;
}

void check_balance(const std::vector<Token>& tokens) {
  std::vector<std::size_t> open;
  for (const auto& t : tokens) {
    if (t.kind == TokenKind::LParen) {
      open.push_back(t.position);
    } else if (t.kind == TokenKind::RParen) {
      if (open.empty()) throw ParseError(ParseError::Kind::UnbalancedParens, t.position, "unmatched ')'");
      open.pop_back();
    }
  }
  if (!open.empty()) throw ParseError(ParseError::Kind::UnbalancedParens, open.back(), "unmatched '('");
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, ParseMode mode) : tokens_(tokens), mode_(mode) {}

  SurfacePtr run() {
    if (tokens_.empty()) throw ParseError(ParseError::Kind::Syntax, 0, "empty formula");
    check_balance(tokens_);
    auto s = chain();
    if (pos_ < tokens_.size()) fail("unexpected '" + tokens_[pos_].text + "'");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    const std::size_t offset = pos_ < tokens_.size()
                                   ? tokens_[pos_].position
                                   : tokens_.back().position + code_points(tokens_.back().text);
    throw ParseError(ParseError::Kind::Syntax, offset, msg);
  }

  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  const Token& expect(TokenKind kind, const char* what) {
    const Token* t = peek();
    if (!t || t->kind != kind) fail(std::string("expected ") + what);
    ++pos_;
    return *t;
  }

  SurfacePtr chain() {
    auto node = std::make_shared<Surface>();
    node->kind = Surface::Kind::Chain;
    node->operands.push_back(unary());
    while (const Token* t = peek()) {
      const auto op = binary_op(t->kind);
      if (!op) break;
      if (mode_ == ParseMode::FullyParenthesized && !node->ops.empty()) {
        fail("connective chain needs parentheses");
      }
      ++pos_;
      node->ops.push_back(*op);
      node->operands.push_back(unary());
    }
    if (node->ops.empty()) return node->operands.front();
    return node;
  }

  SurfacePtr unary() {
    const Token* t = peek();
    if (!t) fail("unexpected end of formula");
    auto node = std::make_shared<Surface>();
    switch (t->kind) {
      case TokenKind::Not:
        ++pos_;
        node->kind = Surface::Kind::Not;
        node->operands.push_back(unary());
        return node;
      case TokenKind::Forall:
      case TokenKind::Exists:
        ++pos_;
        node->kind = Surface::Kind::Quantified;
        node->quantifier = t->kind == TokenKind::Forall ? Quantifier::Forall : Quantifier::Exists;
        node->variable = expect(TokenKind::Identifier, "quantified variable").text;
        node->operands.push_back(unary());
        return node;
      case TokenKind::LParen: {
        ++pos_;
        auto inner = chain();
        expect(TokenKind::RParen, "')'");
        return inner;
      }
      case TokenKind::Identifier: {
        ++pos_;
        node->kind = Surface::Kind::Atom;
        node->atom.predicate = t->text;
        const Token* open = peek();
        if (open && open->kind == TokenKind::LParen) {
          ++pos_;
          node->atom.args.push_back(expect(TokenKind::Identifier, "argument name").text);
          while (peek() && peek()->kind == TokenKind::Comma) {
            ++pos_;
            node->atom.args.push_back(expect(TokenKind::Identifier, "argument name").text);
          }
          expect(TokenKind::RParen, "')' closing argument list");
        }
        return node;
      }
      default:
        fail("unexpected '" + t->text + "'");
    }
  }

  const std::vector<Token>& tokens_;
  ParseMode mode_;
  std::size_t pos_ = 0;
};

}  // namespace

SurfacePtr parse_surface(const std::vector<Token>& tokens, ParseMode mode) {
  return Parser(tokens, mode).run();
}

FolExpr resolve_chain(const std::vector<FolExpr>& operands, const std::vector<BinaryOp>& ops) {
  std::size_t next = 0;  // index of the next operator to consume
  std::function<FolExpr(std::size_t, int)> climb = [&](std::size_t lhs_index, int min_prec) -> FolExpr {
    FolExpr lhs = operands[lhs_index];
    while (next < ops.size() && precedence(ops[next]) >= min_prec) {
      const BinaryOp op = ops[next];
      const std::size_t rhs_index = ++next;
      const int next_min = is_right_associative(op) ? precedence(op) : precedence(op) + 1;
      FolExpr rhs = climb(rhs_index, next_min);
      lhs = FolExpr::binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  };
  return climb(0, 0);
}

FolExpr resolve(const Surface& s) {
  switch (s.kind) {
    case Surface::Kind::Atom:
      return FolExpr::atom(s.atom.predicate, s.atom.args);
    case Surface::Kind::Not:
      return FolExpr::negation(resolve(*s.operands.front()));
    case Surface::Kind::Quantified:
      return FolExpr::quantified(s.quantifier, s.variable, resolve(*s.operands.front()));
    case Surface::Kind::Chain: {
      std::vector<FolExpr> operands;
      operands.reserve(s.operands.size());
      for (const auto& o : s.operands) operands.push_back(resolve(*o));
      return resolve_chain(operands, s.ops);
    }
  }
  return FolExpr::atom("?");
}

}  // namespace detail

FolExpr parse(const std::vector<Token>& tokens, ParseMode mode) {
  return detail::resolve(*detail::parse_surface(tokens, mode));
}

FolExpr parse(std::string_view text, ParseMode mode) { return parse(tokenize(text), mode); }

}  // namespace folreward
