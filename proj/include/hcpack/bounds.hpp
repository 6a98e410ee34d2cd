#pragma once

// Recorded inequality checks and the failure types shared by the solvers.

#include "hcpack/rational.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hcpack {

struct BoundCheck {
  std::string name;
  Scalar lhs, rhs;  // the check is lhs <= rhs
  bool holds() const { return lhs <= rhs; }
  Scalar slack() const { return rhs - lhs; }
};

/// A proven inequality failed at run time: an implementation bug or a broken precondition.
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An enumeration or search exceeded its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_bound(std::vector<BoundCheck>& log, std::string name, Scalar lhs, Scalar rhs) {
  log.push_back(BoundCheck{std::move(name), std::move(lhs), std::move(rhs)});
  const BoundCheck& b = log.back();
  if (!b.holds())
    throw BoundViolation(b.name + ": " + to_string(b.lhs) + " > " + to_string(b.rhs));
}

}  // namespace hcpack
