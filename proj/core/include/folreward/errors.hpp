#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace folreward {

/// Failure while turning formula text into a syntax tree.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Lexical, Syntax, UnbalancedParens };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  /// Character (code point) offset into the source text.
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// A configured search or enumeration limit was hit.
class CapExceeded : public std::runtime_error {
 public:
  enum class Which { ChainLength, Atoms, FactorialAtoms };

  CapExceeded(Which which, std::size_t limit, std::size_t actual);

  Which which() const noexcept { return which_; }
  std::size_t limit() const noexcept { return limit_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  Which which_;
  std::size_t limit_;
  std::size_t actual_;
};

}  // namespace folreward
