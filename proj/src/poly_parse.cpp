#include "cstress/poly_parse.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace cstress {

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t offset) : s_(text), offset_(offset) {}

  PolyScalar parse() {
    PolyScalar p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, offset_ + pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  PolyScalar expr() {
    PolyScalar acc = term();
    for (;;) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  PolyScalar term() {
    PolyScalar acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        const double d = number();
        if (d == 0.0) fail("division by zero");
        acc *= 1.0 / d;
      } else {
        return acc;
      }
    }
  }

  PolyScalar unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  PolyScalar power() {
    PolyScalar base = primary();
    if (!accept('^')) return base;
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int e = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, e);
    if (e > kMaxDegree) fail("exponent exceeds degree cap");
    PolyScalar r = PolyScalar::constant(1.0);
    for (int k = 0; k < e; ++k) r = r * base;
    return r;
  }

  double number() {
    skip_ws();
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("expected number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }

  PolyScalar primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      PolyScalar p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (c == 'x' || c == 'y' || c == 'z') {
      ++pos_;
      return PolyScalar::coordinate(c - 'x');
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return PolyScalar::constant(number());
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

PolyScalar parse_scalar(std::string_view text) { return Parser(text, 0).parse(); }

PolyVector parse_vector(std::string_view text) {
  std::size_t begin = 0, end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  if (end - begin >= 2 && ((text[begin] == '[' && text[end - 1] == ']') ||
                           (text[begin] == '(' && text[end - 1] == ')'))) {
    // Only strip parentheses when they enclose the whole list.
    int depth = 0;
    bool encloses = true;
    for (std::size_t i = begin; i < end; ++i) {
      if (text[i] == '(' || text[i] == '[') ++depth;
      if (text[i] == ')' || text[i] == ']') --depth;
      if (depth == 0 && i + 1 < end) encloses = false;
    }
    if (encloses) {
      ++begin;
      --end;
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> parts;
  int depth = 0;
  std::size_t start = begin;
  for (std::size_t i = begin; i < end; ++i) {
    if (text[i] == '(') ++depth;
    else if (text[i] == ')') --depth;
    else if (text[i] == ',' && depth == 0) {
      parts.emplace_back(start, i);
      start = i + 1;
    }
  }
  parts.emplace_back(start, end);
  if (parts.size() != 3)
    throw ParseError("vector literal needs 3 components, got " + std::to_string(parts.size()), begin);
  PolyVector v;
  for (std::size_t k = 0; k < 3; ++k)
    v[k] = Parser(text.substr(parts[k].first, parts[k].second - parts[k].first), parts[k].first)
               .parse();
  return v;
}

}  // namespace cstress
