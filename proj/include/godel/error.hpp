#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace godel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline std::string format_point(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}
}  // namespace detail

/// Expression text could not be parsed. `offset()` is the byte offset of the fault.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, VariableOutOfRange, NonConstantExponent };

  ParseError(Kind kind, const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) {}
  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// log/sqrt of a negative number, division by zero, or a non-finite result.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::vector<double> x)
      : Error(what + " at x = " + detail::format_point(x)), point_(std::move(x)) {}
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// H(x) = B^2 + A C <= 0: the metric is not Lorentzian at `point()`.
class LorentzViolation : public Error {
 public:
  LorentzViolation(std::vector<double> x, double h)
      : Error(message(x, h)), point_(std::move(x)), h_(h) {}
  const std::vector<double>& point() const noexcept { return point_; }
  double h_value() const noexcept { return h_; }

 private:
  static std::string message(const std::vector<double>& x, double h) {
    std::ostringstream os;
    os.precision(17);
    os << "Lorentz condition H = B^2 + A C > 0 violated at x = " << detail::format_point(x)
       << " (H = " << h << ")";
    return os.str();
  }
  std::vector<double> point_;
  double h_;
};

/// |L(x)| = |b^2 + a c| fell below the configured floor on a path.
class DegenerateL : public Error {
 public:
  DegenerateL(double ell, double floor)
      : Error("degenerate path functional: |b^2 + a c| = " + std::to_string(ell) +
              " <= floor " + std::to_string(floor)),
        ell_(ell) {}
  double ell() const noexcept { return ell_; }

 private:
  double ell_;
};

/// Invalid input that is not a numerical failure (bad parameter, bad shape, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace godel
