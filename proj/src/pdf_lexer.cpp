#include "pdfuzz/pdf_lexer.hpp"

#include <cstdlib>

#include <fmt/format.h>

#include "pdfuzz/errors.hpp"

namespace pdfuzz::pdf {

bool is_pdf_whitespace(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

bool is_pdf_delimiter(char c) {
  return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' ||
         c == '}' || c == '/' || c == '%';
}

const Object* find(const Dict& dict, std::string_view key) {
  for (const auto& [k, v] : dict) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool parse_number(std::string_view text, double& out, bool& integer) {
  if (text.empty()) return false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') ++i;
  bool digits = false;
  bool dot = false;
  for (; i < text.size(); ++i) {
    if (text[i] >= '0' && text[i] <= '9') {
      digits = true;
    } else if (text[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  if (!digits) return false;
  std::string buf(text);
  out = std::strtod(buf.c_str(), nullptr);
  integer = !dot;
  return true;
}

}  // namespace

void Lexer::skip_whitespace_and_comments() {
  while (pos_ < data_.size()) {
    const char c = data_[pos_];
    if (is_pdf_whitespace(c)) {
      ++pos_;
    } else if (c == '%') {
      while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
    } else {
      break;
    }
  }
}

Token Lexer::peek() {
  const std::size_t saved = pos_;
  Token t = next();
  pos_ = saved;
  return t;
}

Token Lexer::next() {
  skip_whitespace_and_comments();
  Token t;
  t.offset = absolute(pos_);
  if (pos_ >= data_.size()) {
    t.kind = Token::Kind::kEnd;
    return t;
  }
  const char c = data_[pos_];
  switch (c) {
    case '(':
      t.kind = Token::Kind::kString;
      t.text = read_literal_string();
      return t;
    case '<':
      if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
        pos_ += 2;
        t.kind = Token::Kind::kDictBegin;
      } else {
        t.kind = Token::Kind::kString;
        t.text = read_hex_string();
      }
      return t;
    case '>':
      if (pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
        pos_ += 2;
        t.kind = Token::Kind::kDictEnd;
        return t;
      }
      throw ParseError("stray '>'", t.offset);
    case '[':
      ++pos_;
      t.kind = Token::Kind::kArrayBegin;
      return t;
    case ']':
      ++pos_;
      t.kind = Token::Kind::kArrayEnd;
      return t;
    case '/':
      t.kind = Token::Kind::kName;
      t.text = read_name();
      return t;
    case ')':
      throw ParseError("unbalanced ')'", t.offset);
    case '{':
    case '}':
      // PostScript calculator braces; treated as keywords.
      ++pos_;
      t.kind = Token::Kind::kKeyword;
      t.text = std::string(1, c);
      return t;
    default:
      break;
  }

  const std::size_t start = pos_;
  while (pos_ < data_.size() && !is_pdf_whitespace(data_[pos_]) && !is_pdf_delimiter(data_[pos_])) {
    ++pos_;
  }
  const std::string_view word = data_.substr(start, pos_ - start);
  if (parse_number(word, t.number, t.integer)) {
    t.kind = Token::Kind::kNumber;
  } else {
    t.kind = Token::Kind::kKeyword;
  }
  t.text = std::string(word);
  return t;
}

std::string Lexer::read_literal_string() {
  const std::size_t open = pos_;
  ++pos_;
  std::string out;
  int depth = 1;
  while (pos_ < data_.size()) {
    const char c = data_[pos_++];
    if (c == '(') {
      ++depth;
      out.push_back(c);
    } else if (c == ')') {
      if (--depth == 0) return out;
      out.push_back(c);
    } else if (c == '\\') {
      if (pos_ >= data_.size()) break;
      const char e = data_[pos_++];
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case 't': out.push_back('\t'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case '\r':
          if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
          break;
        case '\n':
          break;
        default:
          if (e >= '0' && e <= '7') {
            int value = e - '0';
            for (int k = 0; k < 2 && pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '7';
                 ++k) {
              value = value * 8 + (data_[pos_++] - '0');
            }
            out.push_back(static_cast<char>(value & 0xFF));
          } else {
            out.push_back(e);
          }
      }
    } else if (c == '\r') {
      // An unescaped end-of-line in a string reads as a single '\n'.
      if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
      out.push_back('\n');
    } else {
      out.push_back(c);
    }
  }
  throw ParseError("unterminated string literal", absolute(open));
}

std::string Lexer::read_hex_string() {
  const std::size_t open = pos_;
  ++pos_;
  std::string out;
  int pending = -1;
  while (pos_ < data_.size()) {
    const char c = data_[pos_++];
    if (c == '>') {
      if (pending >= 0) out.push_back(static_cast<char>(pending << 4));
      return out;
    }
    if (is_pdf_whitespace(c)) continue;
    const int v = hex_value(c);
    if (v < 0) throw ParseError(fmt::format("invalid hex digit '{}'", c), absolute(pos_ - 1));
    if (pending < 0) {
      pending = v;
    } else {
      out.push_back(static_cast<char>((pending << 4) | v));
      pending = -1;
    }
  }
  throw ParseError("unterminated hex string", absolute(open));
}

std::string Lexer::read_name() {
  ++pos_;  // '/'
  std::string out;
  while (pos_ < data_.size() && !is_pdf_whitespace(data_[pos_]) && !is_pdf_delimiter(data_[pos_])) {
    const char c = data_[pos_++];
    if (c == '#' && pos_ + 1 < data_.size() && hex_value(data_[pos_]) >= 0 &&
        hex_value(data_[pos_ + 1]) >= 0) {
      out.push_back(static_cast<char>(hex_value(data_[pos_]) * 16 + hex_value(data_[pos_ + 1])));
      pos_ += 2;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

Object Lexer::parse_object(bool allow_refs) { return parse_object_from(next(), allow_refs); }

Object Lexer::parse_object_from(Token t, bool allow_refs) {
  using K = Token::Kind;
  switch (t.kind) {
    case K::kNumber: {
      if (allow_refs && t.integer && t.number >= 0) {
        const std::size_t saved = pos_;
        Token gen = next();
        if (gen.kind == K::kNumber && gen.integer && gen.number >= 0) {
          Token r = next();
          if (r.kind == K::kKeyword && r.text == "R") {
            return Object{Ref{static_cast<std::uint32_t>(t.number),
                              static_cast<std::uint32_t>(gen.number)}};
          }
        }
        pos_ = saved;
      }
      return Object{t.number};
    }
    case K::kName:
      return Object{Name{t.text}};
    case K::kString:
      return Object{String{t.text}};
    case K::kArrayBegin: {
      Array arr;
      for (;;) {
        Token item = next();
        if (item.kind == K::kArrayEnd) break;
        if (item.kind == K::kEnd) throw ParseError("unterminated array", t.offset);
        if (item.kind == K::kDictEnd) throw ParseError("unbalanced '>>' inside array", item.offset);
        arr.push_back(parse_object_from(std::move(item), allow_refs));
      }
      return Object{std::move(arr)};
    }
    case K::kDictBegin: {
      Dict dict;
      for (;;) {
        Token key = next();
        if (key.kind == K::kDictEnd) break;
        if (key.kind == K::kEnd) throw ParseError("unterminated dictionary", t.offset);
        if (key.kind != K::kName) throw ParseError("dictionary key is not a name", key.offset);
        Token value = next();
        if (value.kind == K::kEnd) throw ParseError("unterminated dictionary", t.offset);
        if (value.kind == K::kDictEnd) {
          dict.emplace_back(key.text, Object{Null{}});
          break;
        }
        dict.emplace_back(key.text, parse_object_from(std::move(value), allow_refs));
      }
      return Object{std::move(dict)};
    }
    case K::kKeyword:
      if (t.text == "true") return Object{true};
      if (t.text == "false") return Object{false};
      if (t.text == "null") return Object{Null{}};
      throw ParseError(fmt::format("unexpected keyword '{}'", t.text), t.offset);
    case K::kArrayEnd:
      throw ParseError("unbalanced ']'", t.offset);
    case K::kDictEnd:
      throw ParseError("unbalanced '>>'", t.offset);
    case K::kEnd:
      throw ParseError("unexpected end of data", t.offset);
  }
  throw ParseError("unreachable token kind", t.offset);
}

}  // namespace pdfuzz::pdf
