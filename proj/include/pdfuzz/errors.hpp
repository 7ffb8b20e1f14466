#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdfuzz {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A character that the single-byte font encoding cannot represent.
class EncodingError : public Error {
 public:
  EncodingError(char32_t ch, std::size_t index);

  char32_t character() const { return character_; }
  std::size_t index() const { return index_; }

 private:
  char32_t character_;
  std::size_t index_;
};

// Invalid configuration (geometry, model parameters, corpus shape).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (length mismatch etc).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed PDF file or content stream. `offset` is the byte position at
// which the problem was detected.
class ParseError : public Error {
 public:
  // Binary formats report byte offsets, line-oriented formats line numbers.
  enum class Unit { kByte, kLine };

  ParseError(const std::string& what, std::size_t offset, Unit unit = Unit::kByte);

  std::size_t offset() const { return offset_; }
  Unit unit() const { return unit_; }

 private:
  std::size_t offset_;
  Unit unit_;
};

class InterpretError : public Error {
 public:
  using Error::Error;
};

}  // namespace pdfuzz
