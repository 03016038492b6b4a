#include "lfa/types.hpp"

#include <fmt/format.h>

namespace lfa {

ExtendedScalar ExtendedScalar::finite(double x) {
  if (!std::isfinite(x) || x < 0.0) throw InternalFault(fmt::format("ExtendedScalar::finite({})", x));
  return ExtendedScalar(x);
}

ExtendedScalar ExtendedScalar::from_double(double x) {
  if (std::isinf(x) && x > 0) return infinity();
  return finite(x);
}

std::string ExtendedScalar::to_string() const {
  if (is_infinite()) return "inf";
  return fmt::format("{:.17g}", value_);
}

ParseError::ParseError(int line, int column, const std::string& msg)
    : Error(fmt::format("line {}, column {}: {}", line, column, msg)), line_(line), column_(column) {}

}  // namespace lfa
