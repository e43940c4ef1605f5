#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gibbsfit/errors.hpp"

namespace gibbsfit {

/// Alphabet symbols are small integers; textual I/O renders them as base-36 digits.
using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

constexpr int kMaxAlphabet = 36;

inline char symbol_to_char(Symbol s) {
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

inline Symbol char_to_symbol(char c) {
  if (c >= '0' && c <= '9') return static_cast<Symbol>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<Symbol>(c - 'a' + 10);
  if (c >= 'A' && c <= 'Z') return static_cast<Symbol>(c - 'A' + 10);
  throw DomainError(std::string("not a base-36 digit: '") + c + "'");
}

inline std::string word_to_string(WordView w) {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(symbol_to_char(s));
  return out;
}

inline Word word_from_string(const std::string& text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) w.push_back(char_to_symbol(c));
  return w;
}

inline bool lex_less(WordView a, WordView b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace gibbsfit
