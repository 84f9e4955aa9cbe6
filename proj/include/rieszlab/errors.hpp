#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rieszlab {

/// Requested tolerance could not be certified; carries the best value found
/// and the achieved error estimate.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, std::vector<double> best, double achieved, double requested)
      : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ", requested " +
                           std::to_string(requested) + ")"),
        best_value(std::move(best)),
        achieved_estimate(achieved),
        requested_tolerance(requested) {}

  std::vector<double> best_value;
  double achieved_estimate;
  double requested_tolerance;
};

/// Operation requires s < d-1 (or another parameter regime) and got something else.
class RegimeError : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Kernel power p >= d: the integral does not converge.
class InvalidPowerError : public std::domain_error {
  using std::domain_error::domain_error;
};

class UnsupportedDimensionError : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Construction arguments violate a documented invariant.
class SpecError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// radial_witness could not place the mass-matching radius on the support.
class NoWitnessError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two independent evaluation routes disagree beyond the allowed slack.
class RouteDisagreementError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation assumes a nonnegative measure and got a signed one.
class NegativityError : public std::domain_error {
  using std::domain_error::domain_error;
};

/// A constructed measure failed its mass-normalization certificate.
class NormalizationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rieszlab
