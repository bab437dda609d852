#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace omcool {

// Adaptive quadrature failed to reach its tolerance. Carries the best
// estimate achieved so callers can still inspect it.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double estimate_, double error_bound_)
        : std::runtime_error(what), estimate(estimate_), error_bound(error_bound_) {}
    double estimate;
    double error_bound;
};

// Thermometer inversion: the observed value is not attained anywhere in the
// requested temperature bracket.
class UnattainableObservation : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thermometer inversion: more than one temperature matches the observation.
// All roots are reported; none is silently picked.
class AmbiguousInversion : public std::runtime_error {
  public:
    AmbiguousInversion(const std::string& what, std::vector<double> roots_)
        : std::runtime_error(what), roots(std::move(roots_)) {}
    std::vector<double> roots;  // K, ascending
};

// Malformed configuration or data file.
class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace omcool
