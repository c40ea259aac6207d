#pragma once

// Numerical geodesic + perpendicular Jacobi integration for conformal metrics.
//
// In arclength, with phi = u + log 2 - log(1 - |z|^2):
//   x' = e^-phi cos(theta),  y' = e^-phi sin(theta),
//   theta' = e^-phi (phi_y cos(theta) - phi_x sin(theta)),
//   j'' = -K j.
// The local chart is re-reduced into the octagon after every step.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "focalfree/lifted.hpp"
#include "focalfree/metric.hpp"

namespace focalfree {

struct IntegratorConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = 0.025;
  // Shooting, aiming and recorded rays use fixed steps so that the result is
  // a smooth function of the launch data; adaptive step selection would add
  // tolerance-sized jumps that the flow amplifies exponentially.
  double fixed_step = 0.025;
  double horizon = 1e5;
  std::string method = "rkf78";

  void validate() const;
};

struct GeodesicState {
  LiftedTangent v;
  double j = 0.0;
  double jp = 0.0;
  double time = 0.0;
};

class GeodesicIntegrator {
 public:
  explicit GeodesicIntegrator(const ConformalMetric& metric, IntegratorConfig config = {});

  const ConformalMetric& metric() const { return metric_; }
  const IntegratorConfig& config() const { return config_; }

  // Adaptive integration forward by dt >= 0.
  GeodesicState advance(GeodesicState s, double dt) const;
  // Adaptive integration hitting each time in `times` (nondecreasing, >= s.time) exactly.
  void sample(GeodesicState s, const std::vector<double>& times,
              const std::function<void(std::size_t, const GeodesicState&)>& visit) const;
  // One fixed Runge-Kutta step of size h > 0.
  GeodesicState step(const GeodesicState& s, double h) const;
  // Fixed steps of size config().fixed_step (the last one shortened) covering dt >= 0.
  GeodesicState advance_fixed(GeodesicState s, double dt) const;

  using State = std::array<double, 5>;  // x, y, theta, j, jp
  void rhs(const State& s, State& ds) const;

 private:
  GeodesicState finish(const GeodesicState& from, const State& x, double dt) const;

  ConformalMetric metric_;
  IntegratorConfig config_;
};

}  // namespace focalfree
