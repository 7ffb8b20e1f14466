#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pdfuzz::pdf {

struct Null {
  bool operator==(const Null&) const = default;
};

struct Name {
  std::string value;
  bool operator==(const Name&) const = default;
};

struct String {
  std::string bytes;
  bool operator==(const String&) const = default;
};

struct Ref {
  std::uint32_t num = 0;
  std::uint32_t gen = 0;
  bool operator==(const Ref&) const = default;
};

struct Object;
using Array = std::vector<Object>;
using Dict = std::vector<std::pair<std::string, Object>>;

struct Object {
  std::variant<Null, bool, double, Name, String, Array, Dict, Ref> value;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&value);
  }
  bool is_null() const { return std::holds_alternative<Null>(value); }
};

// Linear lookup; PDF dictionaries are small.
const Object* find(const Dict& dict, std::string_view key);

struct Token {
  enum class Kind {
    kNumber,
    kName,
    kString,
    kArrayBegin,
    kArrayEnd,
    kDictBegin,
    kDictEnd,
    kKeyword,
    kEnd,
  };
  Kind kind = Kind::kEnd;
  std::string text;  // name value, decoded string bytes, or keyword
  double number = 0.0;
  bool integer = false;
  std::size_t offset = 0;
};

// Tokenizer over a byte buffer. `base_offset` is added to reported offsets
// so errors inside an embedded stream point into the enclosing file.
class Lexer {
 public:
  explicit Lexer(std::string_view data, std::size_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  Token next();
  Token peek();

  std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  std::size_t absolute(std::size_t local) const { return base_ + local; }
  std::string_view data() const { return data_; }

  void skip_whitespace_and_comments();

  // Parses one object starting at the next token. `allow_refs` enables the
  // "num gen R" form, which never appears in content streams.
  Object parse_object(bool allow_refs);
  Object parse_object_from(Token first, bool allow_refs);

 private:
  std::string read_literal_string();
  std::string read_hex_string();
  std::string read_name();

  std::string_view data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

bool is_pdf_whitespace(char c);
bool is_pdf_delimiter(char c);

}  // namespace pdfuzz::pdf
