#pragma once

// Tokeniser shared by the program parser and the criterion parser.

#include <string>
#include <string_view>
#include <vector>

#include "itml/frontend.hpp"

namespace itml::detail {

enum class Tok : uint8_t {
  End, Ident, AdminIdent, Int, Float, Str,
  // keywords
  Let, In, Fun, Rec, If, Then, Else, While, Do, Case, Of, Inl, Inr, Try, With, Raise, Ref, Return,
  Fst, Snd, Not, Mod, True, False, Array,
  // punctuation
  LParen, RParen, LBracket, RBracket, LArr, RArr, Comma, Semi, SemiSemi, Underscore, Bar,
  Equals, ColonEq, LeftArrow, Arrow, FatArrow,
  Plus, Minus, Star, Slash, Lt, Le, Gt, Ge, EqEq, Ne, AndAnd, OrOr, Bang,
};

struct Token {
  Tok kind = Tok::End;
  uint32_t begin = 0, end = 0;
  // Whitespace or a comment separates this token from the previous one.
  bool space_before = false;
  std::string text;  // identifier name or decoded string literal
  int64_t int_value = 0;
  // Integer literal equal to 2^63, only valid directly after a unary minus.
  bool int_overflow = false;
  double float_value = 0.0;
};

std::string_view token_name(Tok t);

// Throws SyntaxError. The last token is always End.
std::vector<Token> tokenize(std::string_view source, bool core_names);

}  // namespace itml::detail
