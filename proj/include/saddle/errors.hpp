#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace saddle {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> hist)
      : Error(what), history(std::move(hist)) {}
  std::vector<double> history;
};

}  // namespace saddle
