#pragma once

#include <cmath>
#include <complex>

#include "focalfree/disk.hpp"
#include "focalfree/metric.hpp"
#include "focalfree/rng.hpp"

namespace fftest {

using namespace focalfree;

// Moderate bump used across the unit tests.
inline ConformalMetric test_bump() { return ConformalMetric::bump(0.3, {0.05, 0.02}, 1.2); }

// Independent closed form: arccosh(1 + 2|z-w|^2 / ((1-|z|^2)(1-|w|^2))).
inline double acosh_distance(Complex z, Complex w) {
  return std::acosh(1.0 + 2.0 * std::norm(z - w) / ((1.0 - std::norm(z)) * (1.0 - std::norm(w))));
}

inline DiskPoint random_point(Rng& rng, double max_radius) {
  const double r = max_radius * std::sqrt(rng.uniform());
  return DiskPoint::from(std::polar(r, rng.uniform(0.0, kTwoPi)));
}

}  // namespace fftest
