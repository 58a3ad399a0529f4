#pragma once
// Character cursor shared by the small text grammars in this library.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rt/error.hpp"
#include "rt/multi_index.hpp"

namespace rt::text {

class Cursor {
 public:
  explicit Cursor(std::string_view src) : src_(src) {}

  std::size_t position() const noexcept { return pos_; }
  bool at_end() {
    skip_space();
    return pos_ >= src_.size();
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  /// Accepts `word` only when it is not followed by another identifier character.
  bool accept_word(std::string_view word) {
    skip_space();
    if (src_.substr(pos_, word.size()) != word) return false;
    const std::size_t after = pos_ + word.size();
    if (after < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[after])) || src_[after] == '_'))
      return false;
    pos_ = after;
    return true;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("identifier");
    return std::string(src_.substr(start, pos_ - start));
  }

  Index integer() {
    skip_space();
    std::size_t p = pos_;
    if (p < src_.size() && src_[p] == '+') ++p;
    Index v = 0;
    const char* first = src_.data() + p;
    auto [ptr, ec] = std::from_chars(first, src_.data() + src_.size(), v);
    if (ec != std::errc() || ptr == first) fail("integer");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return v;
  }

  double number() {
    skip_space();
    double v = 0;
    const char* first = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, src_.data() + src_.size(), v);
    if (ec != std::errc() || ptr == first) fail("number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    return v;
  }

  /// Quoted string with double quotes; no escapes.
  std::string quoted() {
    expect('"');
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '"') ++pos_;
    if (pos_ >= src_.size()) fail("closing '\"'");
    std::string out(src_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  /// Tuple of integers: "(a,b,...)"; a one-tuple may be written "(a)" or "(a,)".
  MultiIndex tuple() {
    expect('(');
    std::vector<Index> v;
    if (!accept(')')) {
      do {
        if (peek() == ')') break;
        v.push_back(integer());
      } while (accept(','));
      expect(')');
    }
    if (v.empty()) fail("non-empty tuple");
    return MultiIndex(std::move(v));
  }

  /// "(x, y, ...)" of reals, or a bare number read as a one-tuple.
  std::vector<double> real_tuple() {
    std::vector<double> v;
    if (!accept('(')) {
      v.push_back(number());
      return v;
    }
    do {
      v.push_back(number());
    } while (accept(','));
    expect(')');
    return v;
  }

  std::string rest() {
    skip_space();
    return std::string(src_.substr(pos_));
  }

  [[noreturn]] void fail(const std::string& expected) {
    skip_space();
    std::string found;
    if (pos_ < src_.size()) found = std::string(src_.substr(pos_, std::min<std::size_t>(12, src_.size() - pos_)));
    throw ParseError(pos_, expected, found);
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

/// Parses a whole string as a tuple, e.g. "(10,10)" or "10,10".
inline MultiIndex parse_tuple(std::string_view s) {
  std::string buf(s);
  if (buf.find('(') == std::string::npos) buf = "(" + buf + ")";
  Cursor c(buf);
  MultiIndex t = c.tuple();
  if (!c.at_end()) c.fail("end of tuple");
  return t;
}

}  // namespace rt::text
