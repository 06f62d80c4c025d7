#pragma once

#include <stdexcept>
#include <string>

namespace fracplap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// expression / exponent model
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at position " + std::to_string(position) + ": " + message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownVariable : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class AsymmetricExponent : public Error {
 public:
  using Error::Error;
};

class ExponentOutOfRange : public Error {
 public:
  using Error::Error;
};

class OrderTooLarge : public Error {
 public:
  using Error::Error;
};

// function spaces
class MeshMismatch : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// discretization
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DivergentIntegral : public Error {
 public:
  using Error::Error;
};

class DisconnectedKernel : public Error {
 public:
  using Error::Error;
};

class KernelFormatError : public Error {
 public:
  using Error::Error;
};

// diagnostics
class UnsupportedTestFunction : public Error {
 public:
  using Error::Error;
};

class ZeroSeminorm : public Error {
 public:
  using Error::Error;
};

class ExponentRangeViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace fracplap
