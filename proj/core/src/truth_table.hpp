#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "folreward/syntax.hpp"

namespace folreward::detail {

/// Compiled pair of propositional skeletons, evaluated 64 truth-table rows
/// per machine word.
class PropositionalScorer {
 public:
  /// Both formulas must already be canonicalized; quantifiers are stripped here.
  PropositionalScorer(const FolExpr& prediction, const FolExpr& reference);

  const std::vector<AtomicUnit>& prediction_atoms() const { return prediction_atoms_; }
  const std::vector<AtomicUnit>& reference_atoms() const { return reference_atoms_; }

  struct Result {
    double score = 0.0;
    std::size_t rows = 0;
    std::size_t variables = 0;
  };

  /// target[i] is the reference atom bound to prediction atom i, or -1.
  Result score(std::span<const int> target, std::size_t max_atoms) const;

 private:
  struct Instr {
    enum class Op : std::uint8_t { Var, Not, And, Or, Implies, Iff, Xor };
    Op op;
    std::uint32_t slot;  // atom index for Var
  };

  static void compile(const FolExpr& e, const std::vector<AtomicUnit>& atoms, std::vector<Instr>& out);
  static std::uint64_t eval(const std::vector<Instr>& program, std::span<const std::uint32_t> slot_to_var,
                            std::uint64_t word, std::vector<std::uint64_t>& stack);

  std::vector<AtomicUnit> prediction_atoms_;
  std::vector<AtomicUnit> reference_atoms_;
  std::vector<Instr> prediction_program_;
  std::vector<Instr> reference_program_;
};

}  // namespace folreward::detail
