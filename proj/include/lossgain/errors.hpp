#pragma once

#include <stdexcept>
#include <string>

namespace lossgain {

// Malformed model description (wrong pair count, missing profile data, ...).
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain where a function is defined or differentiable.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Parameters outside the window in which a closed-form family is valid.
// gate() names the violated condition.
class RangeError : public std::out_of_range {
 public:
  RangeError(std::string gate, const std::string& what)
      : std::out_of_range(what), gate_(std::move(gate)) {}
  const std::string& gate() const noexcept { return gate_; }

 private:
  std::string gate_;
};

// Evaluation on a pole or chart boundary (Calogero collisions, r <= 0 in the
// pseudo-polar chart).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace lossgain
