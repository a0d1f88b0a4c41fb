#include "folreward/syntax.hpp"

namespace folreward {
namespace {

const char* op_text(BinaryOp op, RenderStyle style) {
  const bool u = style == RenderStyle::Unicode;
  switch (op) {
    case BinaryOp::And:
      return u ? "∧" : "&";
    case BinaryOp::Or:
      return u ? "∨" : "|";
    case BinaryOp::Implies:
      return u ? "→" : "->";
    case BinaryOp::Iff:
      return u ? "↔" : "<->";
    case BinaryOp::Xor:
      return u ? "⊕" : "^";
  }
  return "?";
}

bool needs_parens(const FolExpr& child, BinaryOp parent, bool is_left) {
  const auto* b = child.as<FolExpr::Binary>();
  if (!b) return false;
  const int cp = precedence(b->op);
  const int pp = precedence(parent);
  if (cp != pp) return cp < pp;
  return is_right_associative(parent) ? is_left : !is_left;
}

void emit(std::string& out, const FolExpr& e, RenderStyle style) {
  if (const auto* a = e.as<FolExpr::Atom>()) {
    out += a->predicate;
    if (a->args.empty()) return;
    out += '(';
    for (std::size_t i = 0; i < a->args.size(); ++i) {
      if (i) out += ", ";
      out += a->args[i];
    }
    out += ')';
    return;
  }
  if (const auto* n = e.as<FolExpr::Not>()) {
    out += style == RenderStyle::Unicode ? "¬" : "~";
    const bool wrap = n->body.as<FolExpr::Binary>() != nullptr;
    if (wrap) out += '(';
    emit(out, n->body, style);
    if (wrap) out += ')';
    return;
  }
  if (const auto* q = e.as<FolExpr::Quantified>()) {
    if (style == RenderStyle::Unicode) {
      out += q->quantifier == Quantifier::Forall ? "∀" : "∃";
    } else {
      out += q->quantifier == Quantifier::Forall ? "forall " : "exists ";
    }
    out += q->variable;
    out += ' ';
    const bool wrap = q->body.as<FolExpr::Binary>() != nullptr;
    if (wrap) out += '(';
    emit(out, q->body, style);
    if (wrap) out += ')';
    return;
  }
  const auto& b = std::get<FolExpr::Binary>(e.node());
  const bool wrap_left = needs_parens(b.left, b.op, true);
  const bool wrap_right = needs_parens(b.right, b.op, false);
  if (wrap_left) out += '(';
  emit(out, b.left, style);
  if (wrap_left) out += ')';
  out += ' ';
  out += op_text(b.op, style);
  out += ' ';
  if (wrap_right) out += '(';
  emit(out, b.right, style);
  if (wrap_right) out += ')';
}

}  // namespace

std::string render(const FolExpr& expr, RenderStyle style) {
  std::string out;
  emit(out, expr, style);
  return out;
}

}  // namespace folreward
