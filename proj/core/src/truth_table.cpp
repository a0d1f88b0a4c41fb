#include "truth_table.hpp"

#include <bit>
#include <stdexcept>
#include <unordered_map>

#include "folreward/le_metric.hpp"

namespace folreward::detail {
namespace {

constexpr std::uint64_t kColumnMasks[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

std::uint64_t column(std::uint32_t var, std::uint64_t word) {
  if (var < 6) return kColumnMasks[var];
  return ((word >> (var - 6)) & 1u) ? ~0ull : 0ull;
}

}  // namespace

PropositionalScorer::PropositionalScorer(const FolExpr& prediction, const FolExpr& reference)
    : prediction_atoms_(atoms_of(prediction)), reference_atoms_(atoms_of(reference)) {
  compile(strip_quantifiers(prediction), prediction_atoms_, prediction_program_);
  compile(strip_quantifiers(reference), reference_atoms_, reference_program_);
}

void PropositionalScorer::compile(const FolExpr& e, const std::vector<AtomicUnit>& atoms,
                                  std::vector<Instr>& out) {
  using Op = Instr::Op;
  if (const auto* a = e.as<FolExpr::Atom>()) {
    const std::string text = atom_text(*a);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].canonical_text == text) {
        out.push_back({Op::Var, static_cast<std::uint32_t>(i)});
        return;
      }
    }
    throw std::logic_error("atom missing from atom table: " + text);
  }
  if (const auto* n = e.as<FolExpr::Not>()) {
    compile(n->body, atoms, out);
    out.push_back({Op::Not, 0});
    return;
  }
  if (const auto* q = e.as<FolExpr::Quantified>()) {
    compile(q->body, atoms, out);
    return;
  }
  const auto& b = std::get<FolExpr::Binary>(e.node());
  compile(b.left, atoms, out);
  compile(b.right, atoms, out);
  switch (b.op) {
    case BinaryOp::And:
      out.push_back({Op::And, 0});
      break;
    case BinaryOp::Or:
      out.push_back({Op::Or, 0});
      break;
    case BinaryOp::Implies:
      out.push_back({Op::Implies, 0});
      break;
    case BinaryOp::Iff:
      out.push_back({Op::Iff, 0});
      break;
    case BinaryOp::Xor:
      out.push_back({Op::Xor, 0});
      break;
  }
}

std::uint64_t PropositionalScorer::eval(const std::vector<Instr>& program, std::span<const std::uint32_t> slot_to_var,
                                        std::uint64_t word, std::vector<std::uint64_t>& stack) {
  using Op = Instr::Op;
  stack.clear();
  for (const auto& ins : program) {
    if (ins.op == Op::Var) {
      stack.push_back(column(slot_to_var[ins.slot], word));
      continue;
    }
    if (ins.op == Op::Not) {
      stack.back() = ~stack.back();
      continue;
    }
    const std::uint64_t rhs = stack.back();
    stack.pop_back();
    std::uint64_t& lhs = stack.back();
    switch (ins.op) {
      case Op::And:
        lhs &= rhs;
        break;
      case Op::Or:
        lhs |= rhs;
        break;
      case Op::Implies:
        lhs = ~lhs | rhs;
        break;
      case Op::Iff:
        lhs = ~(lhs ^ rhs);
        break;
      case Op::Xor:
        lhs ^= rhs;
        break;
      default:
        break;
    }
  }
  return stack.back();
}

PropositionalScorer::Result PropositionalScorer::score(std::span<const int> target, std::size_t max_atoms) const {
  const std::size_t n_ref = reference_atoms_.size();
  std::vector<std::uint32_t> ref_vars(n_ref);
  for (std::size_t j = 0; j < n_ref; ++j) ref_vars[j] = static_cast<std::uint32_t>(j);

  std::vector<std::uint32_t> pred_vars(prediction_atoms_.size());
  std::uint32_t next_var = static_cast<std::uint32_t>(n_ref);
  for (std::size_t i = 0; i < pred_vars.size(); ++i) {
    pred_vars[i] = target[i] >= 0 ? static_cast<std::uint32_t>(target[i]) : next_var++;
  }
  const std::size_t vars = next_var;
  if (vars > max_atoms) throw CapExceeded(CapExceeded::Which::Atoms, max_atoms, vars);
  if (vars > 63) throw CapExceeded(CapExceeded::Which::Atoms, 63, vars);

  const std::uint64_t rows = 1ull << vars;
  const std::uint64_t words = vars <= 6 ? 1 : rows >> 6;
  const std::uint64_t valid = vars >= 6 ? ~0ull : ((1ull << rows) - 1);

  std::vector<std::uint64_t> stack;
  stack.reserve(16);
  std::uint64_t agree = 0;
  for (std::uint64_t w = 0; w < words; ++w) {
    const std::uint64_t p = eval(prediction_program_, pred_vars, w, stack);
    const std::uint64_t r = eval(reference_program_, ref_vars, w, stack);
    agree += static_cast<std::uint64_t>(std::popcount(~(p ^ r) & valid));
  }
  return Result{static_cast<double>(agree) / static_cast<double>(rows), static_cast<std::size_t>(rows), vars};
}

}  // namespace folreward::detail

namespace folreward {

double propositional_score(const FolExpr& prediction, const FolExpr& reference, const BindingMap& binding,
                           std::size_t max_atoms) {
  if (!binding.injective()) throw std::invalid_argument("binding is not injective");
  detail::PropositionalScorer scorer(prediction, reference);
  const auto& pa = scorer.prediction_atoms();
  const auto& ra = scorer.reference_atoms();
  std::vector<int> target(pa.size(), -1);
  for (const auto& [from, to] : binding.pairs) {
    std::size_t i = 0;
    while (i < pa.size() && !(pa[i] == from)) ++i;
    std::size_t j = 0;
    while (j < ra.size() && !(ra[j] == to)) ++j;
    if (i == pa.size() || j == ra.size()) {
      throw std::invalid_argument("binding pair " + from.canonical_text + " -> " + to.canonical_text +
                                  " is outside the atom sets");
    }
    target[i] = static_cast<int>(j);
  }
  return scorer.score(target, max_atoms).score;
}

}  // namespace folreward
