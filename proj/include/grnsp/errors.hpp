#pragma once

#include <stdexcept>
#include <string>

namespace grnsp {

// Input outside an operation's declared domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iteration, bracket or step-size control gave up.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config or command-line input rejected before any computation.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace grnsp
