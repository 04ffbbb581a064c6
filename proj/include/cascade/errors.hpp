#ifndef CASCADE_ERRORS_HPP
#define CASCADE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cascade {

// Base of all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied values (non-finite, out of range, unknown names).
class invalid_argument_error : public error {
 public:
  using error::error;
};

// Malformed species data or configuration files.
class parse_error : public error {
 public:
  using error::error;
};

// Steady-state system is numerically singular (non-unique or
// ill-conditioned steady state). Carries a condition estimate.
class solver_error : public error {
 public:
  solver_error(const std::string& what, double condition_estimate)
      : error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// Derivative or quadrature refinement did not settle. Carries the two
// disagreeing estimates.
class convergence_error : public error {
 public:
  convergence_error(const std::string& what, double estimate_a, double estimate_b)
      : error(what), estimate_a_(estimate_a), estimate_b_(estimate_b) {}
  double estimate_a() const { return estimate_a_; }
  double estimate_b() const { return estimate_b_; }

 private:
  double estimate_a_;
  double estimate_b_;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace cascade

#endif
