#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lfa {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Nonnegative real or +inf.
class ExtendedScalar {
 public:
  ExtendedScalar() = default;

  static ExtendedScalar finite(double x);
  static ExtendedScalar infinity() { return ExtendedScalar(std::numeric_limits<double>::infinity()); }
  // Accepts +inf as well as finite values.
  static ExtendedScalar from_double(double x);

  bool is_infinite() const { return std::isinf(value_); }
  bool is_finite() const { return !is_infinite(); }
  double value() const { return value_; }

  friend bool operator==(const ExtendedScalar&, const ExtendedScalar&) = default;
  friend auto operator<=>(const ExtendedScalar& a, const ExtendedScalar& b) { return a.value_ <=> b.value_; }

  std::string to_string() const;

 private:
  explicit ExtendedScalar(double v) : value_(v) {}
  double value_ = 0.0;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define LFA_ERROR(Name)                                               \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  };

LFA_ERROR(InvariantError)
LFA_ERROR(DimensionError)
LFA_ERROR(DomainError)
LFA_ERROR(SigmaSingular)
LFA_ERROR(AMatrixSingular)
LFA_ERROR(UnsupportedAbstractState)
LFA_ERROR(SearchExhausted)
LFA_ERROR(FixedPointDivergence)
LFA_ERROR(BisectionFailure)
LFA_ERROR(InternalFault)

#undef LFA_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg);
  const char* kind() const noexcept override { return "ParseError"; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace lfa
