#include "lexer.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace itml {

TextPosition position_of(std::string_view source, uint32_t offset) {
  TextPosition p;
  p.offset = offset;
  for (uint32_t k = 0; k < offset && k < source.size(); ++k) {
    if (source[k] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

SyntaxError::SyntaxError(const std::string& message, TextPosition where)
    : Error(fmt::format("syntax error at line {}, column {}: {}", where.line, where.column, message)),
      where(where) {}

ElaborationError::ElaborationError(const std::string& message, TextPosition where)
    : Error(fmt::format("error at line {}, column {}: {}", where.line, where.column, message)), where(where) {}

namespace detail {

std::string_view token_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::AdminIdent: return "administrative name";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::Str: return "string";
    case Tok::Let: return "'let'";
    case Tok::In: return "'in'";
    case Tok::Fun: return "'fun'";
    case Tok::Rec: return "'rec'";
    case Tok::If: return "'if'";
    case Tok::Then: return "'then'";
    case Tok::Else: return "'else'";
    case Tok::While: return "'while'";
    case Tok::Do: return "'do'";
    case Tok::Case: return "'case'";
    case Tok::Of: return "'of'";
    case Tok::Inl: return "'inl'";
    case Tok::Inr: return "'inr'";
    case Tok::Try: return "'try'";
    case Tok::With: return "'with'";
    case Tok::Raise: return "'raise'";
    case Tok::Ref: return "'ref'";
    case Tok::Return: return "'return'";
    case Tok::Fst: return "'fst'";
    case Tok::Snd: return "'snd'";
    case Tok::Not: return "'not'";
    case Tok::Mod: return "'mod'";
    case Tok::True: return "'true'";
    case Tok::False: return "'false'";
    case Tok::Array: return "'array'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LArr: return "'[|'";
    case Tok::RArr: return "'|]'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::SemiSemi: return "';;'";
    case Tok::Underscore: return "'_'";
    case Tok::Bar: return "'|'";
    case Tok::Equals: return "'='";
    case Tok::ColonEq: return "':='";
    case Tok::LeftArrow: return "'<-'";
    case Tok::Arrow: return "'->'";
    case Tok::FatArrow: return "'=>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::EqEq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
  }
  return "token";
}

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
  static const std::unordered_map<std::string_view, Tok> table = {
      {"let", Tok::Let},     {"in", Tok::In},       {"fun", Tok::Fun},       {"rec", Tok::Rec},
      {"if", Tok::If},       {"then", Tok::Then},   {"else", Tok::Else},     {"while", Tok::While},
      {"do", Tok::Do},       {"case", Tok::Case},   {"of", Tok::Of},         {"inl", Tok::Inl},
      {"inr", Tok::Inr},     {"try", Tok::Try},     {"with", Tok::With},     {"raise", Tok::Raise},
      {"ref", Tok::Ref},     {"return", Tok::Return}, {"fst", Tok::Fst},     {"snd", Tok::Snd},
      {"not", Tok::Not},     {"mod", Tok::Mod},     {"true", Tok::True},     {"false", Tok::False},
      {"array", Tok::Array},
  };
  return table;
}

// Longest match first.
struct Punct {
  std::string_view text;
  Tok kind;
};
const Punct kPunct[] = {
    {";;", Tok::SemiSemi}, {"[|", Tok::LArr},     {"|]", Tok::RArr},      {":=", Tok::ColonEq},
    {"<-", Tok::LeftArrow}, {"->", Tok::Arrow},   {"=>", Tok::FatArrow},  {"<=", Tok::Le},
    {">=", Tok::Ge},       {"==", Tok::EqEq},     {"!=", Tok::Ne},        {"&&", Tok::AndAnd},
    {"||", Tok::OrOr},     {"(", Tok::LParen},    {")", Tok::RParen},     {"[", Tok::LBracket},
    {"]", Tok::RBracket},  {",", Tok::Comma},     {";", Tok::Semi},       {"|", Tok::Bar},
    {"=", Tok::Equals},    {"+", Tok::Plus},      {"-", Tok::Minus},      {"*", Tok::Star},
    {"/", Tok::Slash},     {"<", Tok::Lt},        {">", Tok::Gt},         {"!", Tok::Bang},
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

class Lexer {
 public:
  Lexer(std::string_view src, bool core_names) : src_(src), core_names_(core_names) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      bool space = skip_space();
      Token t;
      t.begin = uint32_t(pos_);
      t.space_before = space || out.empty();
      if (pos_ >= src_.size()) {
        t.end = t.begin;
        out.push_back(std::move(t));
        return out;
      }
      lex_one(t);
      t.end = uint32_t(pos_);
      out.push_back(std::move(t));
    }
  }

 private:
  [[noreturn]] void fail(const std::string& message, size_t at) const {
    throw SyntaxError(message, position_of(src_, uint32_t(at)));
  }

  bool skip_space() {
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    return pos_ != start;
  }

  void lex_one(Token& t) {
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return lex_number(t);
    if (c == '"') return lex_string(t);
    if (c == '$') {
      size_t start = pos_++;
      while (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '.')) ++pos_;
      if (!core_names_) fail("names starting with '$' are reserved", start);
      t.kind = Tok::AdminIdent;
      t.text = std::string(src_.substr(start, pos_ - start));
      return;
    }
    if (ident_start(c)) {
      size_t start = pos_;
      while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
      std::string_view word = src_.substr(start, pos_ - start);
      if (word == "_") {
        t.kind = Tok::Underscore;
        return;
      }
      if (word == "inf" || word == "nan") {
        t.kind = Tok::Float;
        t.float_value = word == "inf" ? std::numeric_limits<double>::infinity()
                                      : std::numeric_limits<double>::quiet_NaN();
        return;
      }
      auto it = keywords().find(word);
      t.kind = it == keywords().end() ? Tok::Ident : it->second;
      t.text = std::string(word);
      return;
    }
    for (const Punct& p : kPunct) {
      if (src_.substr(pos_, p.text.size()) == p.text) {
        t.kind = p.kind;
        pos_ += p.text.size();
        return;
      }
    }
    fail(fmt::format("unexpected character '{}'", c), pos_);
  }

  void lex_number(Token& t) {
    size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    bool is_float = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      size_t k = pos_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        is_float = true;
        pos_ = k;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    if (pos_ < src_.size() && ident_char(src_[pos_])) fail("malformed number", start);
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Tok::Float;
      t.float_value = std::strtod(text.c_str(), nullptr);
      return;
    }
    t.kind = Tok::Int;
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    (void)ptr;
    if (ec != std::errc() || v > (uint64_t(1) << 63)) fail("integer literal out of range", start);
    if (v == (uint64_t(1) << 63)) {
      t.int_overflow = true;
      t.int_value = std::numeric_limits<int64_t>::min();
    } else {
      t.int_value = int64_t(v);
    }
  }

  void lex_string(Token& t) {
    size_t start = pos_++;
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated string literal", start);
      char c = src_[pos_++];
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) fail("unterminated string literal", start);
        char e = src_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(fmt::format("unknown escape '\\{}'", e), pos_ - 2);
        }
      } else {
        out += c;
      }
    }
    t.kind = Tok::Str;
    t.text = std::move(out);
  }

  std::string_view src_;
  bool core_names_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, bool core_names) { return Lexer(source, core_names).run(); }

}  // namespace detail
}  // namespace itml
