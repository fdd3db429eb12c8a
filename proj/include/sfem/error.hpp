#pragma once

#include <stdexcept>
#include <string>

namespace sfem {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested quadrature or basis order is not available.
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

/// A point lies outside the parent, parametric, or physical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent box, misaligned local mesh, or similar construction error.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class PreconditionerError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values met inside an iterative solve.
class NumericalBreakdownError : public Error {
 public:
  NumericalBreakdownError(const std::string& what, int iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Problem too large for a dense or profile factorization.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (bad flag, bad pairing).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sfem
