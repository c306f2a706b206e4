#pragma once

// Textual field literals, e.g. "2*x^2*y - z" or "[y^3, 0, x*z]".
// Grammar is documented in docs/config.md.

#include <stdexcept>
#include <string>
#include <string_view>

#include "cstress/poly.hpp"

namespace cstress {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t column)
      : std::runtime_error(what + " (column " + std::to_string(column + 1) + ")"),
        column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

PolyScalar parse_scalar(std::string_view text);

/// Three comma-separated scalar literals, optionally wrapped in [] or ().
PolyVector parse_vector(std::string_view text);

}  // namespace cstress
