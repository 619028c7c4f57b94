#pragma once

#include <stdexcept>
#include <string>

namespace subord {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments or violated preconditions.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Analytic continuation of a logarithm failed along a path.
class BranchError : public Error {
 public:
  enum class Kind { ZeroOnPath, ArgumentJump };

  BranchError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// A point lies too close to a sampled curve for its winding number to be trusted.
class NearBoundaryError : public Error {
 public:
  using Error::Error;
};

// A series or quadrature did not reach its target accuracy.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace subord
