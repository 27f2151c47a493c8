#pragma once

#include <stdexcept>
#include <string>

namespace gql {

// A state or parameter lies outside the domain where a quantity is defined.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Caller passed inconsistent arguments (dimensions, empty budgets, bad config).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// An iterative procedure did not deliver a trustworthy answer.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gql
