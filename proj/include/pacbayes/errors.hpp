#pragma once

#include <stdexcept>
#include <string>

namespace pacbayes {

/// A quantity the math defines as "undefined" (e.g. KL against a Dirac prior).
/// Callers that serialize results map this to the literal string "undefined".
class UndefinedValueError : public std::domain_error {
 public:
  explicit UndefinedValueError(const std::string& what) : std::domain_error(what) {}
};

/// A stated precondition of a formula does not hold for the given inputs.
class PreconditionError : public std::domain_error {
 public:
  explicit PreconditionError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace pacbayes
