#pragma once

#include <stdexcept>
#include <string>

namespace eqm {

/// Bad input to an operation: wrong shape, non-finite number, violated precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation point outside a solution's or drift's declared domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eqm
