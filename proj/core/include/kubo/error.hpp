#pragma once

#include <stdexcept>
#include <string>

namespace kubo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition on an argument (bad size, degenerate basis, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A well-posed input on which the numerics cannot deliver the contract
// (gapless model for a Chern number, inadmissible mesh, sector too large).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace kubo
