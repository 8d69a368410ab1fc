#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace phdisk {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition or input-validation failure.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// An operation touched a masked (singular) node where finite data is required.
class MaskedValueError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A fixed-point solver exhausted its iteration budget at minimum damping.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace phdisk
