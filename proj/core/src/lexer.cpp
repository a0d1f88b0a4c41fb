#include <array>
#include <string>

#include "folreward/syntax.hpp"
#include "utf8.hpp"

namespace folreward {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

namespace {

struct Symbol {
  char32_t code_point;
  TokenKind kind;
};

constexpr std::array<Symbol, 11> kUnicodeSymbols{{
    {U'∀', TokenKind::Forall},
    {U'∃', TokenKind::Exists},
    {U'¬', TokenKind::Not},
    {U'∧', TokenKind::And},
    {U'∨', TokenKind::Or},
    {U'→', TokenKind::Implies},
    {U'↔', TokenKind::Iff},
    {U'⊕', TokenKind::Xor},
    {U'(', TokenKind::LParen},
    {U')', TokenKind::RParen},
    {U',', TokenKind::Comma},
}};

bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_ascii_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v';
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  const std::u32string cps = detail::decode_utf8(text);
  std::vector<Token> out;
  std::size_t i = 0;
  auto emit = [&](TokenKind kind, std::size_t start, std::size_t len) {
    out.push_back(Token{kind, detail::encode_utf8(std::u32string_view(cps).substr(start, len)), start});
  };
  while (i < cps.size()) {
    const char32_t c = cps[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    bool matched = false;
    for (const auto& sym : kUnicodeSymbols) {
      if (sym.code_point == c) {
        emit(sym.kind, i, 1);
        ++i;
        matched = true;
        break;
      }
    }
    if (matched) continue;

    auto next_is = [&](std::size_t k, char32_t want) { return i + k < cps.size() && cps[i + k] == want; };
    switch (c) {
      case U'~':
        emit(TokenKind::Not, i, 1);
        ++i;
        continue;
      case U'&':
        emit(TokenKind::And, i, 1);
        ++i;
        continue;
      case U'|':
        emit(TokenKind::Or, i, 1);
        ++i;
        continue;
      case U'^':
        emit(TokenKind::Xor, i, 1);
        ++i;
        continue;
      case U'-':
        if (next_is(1, U'>')) {
          emit(TokenKind::Implies, i, 2);
          i += 2;
          continue;
        }
        break;
      case U'<':
        if (next_is(1, U'-') && next_is(2, U'>')) {
          emit(TokenKind::Iff, i, 3);
          i += 3;
          continue;
        }
        break;
      default:
        break;
    }

    if (is_ascii_letter(c)) {
      std::size_t j = i + 1;
      while (j < cps.size() && (is_ascii_letter(cps[j]) || is_ascii_digit(cps[j]) || cps[j] == U'_')) ++j;
      Token tok{TokenKind::Identifier, detail::encode_utf8(std::u32string_view(cps).substr(i, j - i)), i};
      if (tok.text == "forall") tok.kind = TokenKind::Forall;
      else if (tok.text == "exists") tok.kind = TokenKind::Exists;
      out.push_back(std::move(tok));
      i = j;
      continue;
    }

    throw ParseError(ParseError::Kind::Lexical, i,
                     "unexpected character '" + detail::encode_utf8(std::u32string_view(&cps[i], 1)) + "'");
  }
  return out;
}

}  // namespace folreward
