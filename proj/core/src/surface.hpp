#pragma once

// Parse result that keeps connective chains flat so bracketing can be
// decided later (by precedence or by enumeration).

#include <memory>
#include <vector>

#include "folreward/syntax.hpp"

namespace folreward::detail {

struct Surface;
using SurfacePtr = std::shared_ptr<const Surface>;

struct Surface {
  enum class Kind { Atom, Not, Quantified, Chain };

  Kind kind = Kind::Atom;
  FolExpr::Atom atom;
  Quantifier quantifier = Quantifier::Forall;
  std::string variable;
  // Not/Quantified: exactly one child. Chain: ops.size() + 1 operands.
  std::vector<SurfacePtr> operands;
  std::vector<BinaryOp> ops;
};

SurfacePtr parse_surface(const std::vector<Token>& tokens, ParseMode mode);

/// Resolves every chain with the precedence table.
FolExpr resolve(const Surface& s);

/// Precedence-climbing tree for a chain of already-built operands.
FolExpr resolve_chain(const std::vector<FolExpr>& operands, const std::vector<BinaryOp>& ops);

}  // namespace folreward::detail
