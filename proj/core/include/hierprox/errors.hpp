#pragma once

#include <stdexcept>
#include <string>

#include "hierprox/trace.hpp"

namespace hierprox {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or operator properties that cannot work together.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Factorization or scalar root-solve failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the range a routine accepts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Iterate norm exceeded the guard. Usually means Fix(T) is empty or unbounded.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, IterTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const IterTrace& trace() const noexcept { return trace_; }

 private:
  IterTrace trace_;
};

}  // namespace hierprox
