#pragma once

// Riemannian distance: closed form for the hyperbolic metric, geodesic
// shooting on the launch angle otherwise.

#include "focalfree/integrator.hpp"
#include "focalfree/lifted.hpp"
#include "focalfree/metric.hpp"

namespace focalfree {

struct BvpOptions {
  double position_tol = 1e-9;  // metric length of the terminal miss
  int max_iterations = 80;
};

struct BvpSolution {
  double distance = 0.0;
  LiftedTangent launch;      // unit tangent at p pointing along the minimizing geodesic
  double residual = 0.0;     // terminal lateral miss (metric length)
  int iterations = 0;
};

BvpSolution solve_bvp(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q,
                      const BvpOptions& options = {}, const IntegratorConfig& config = {});

double distance(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q,
                const BvpOptions& options = {}, const IntegratorConfig& config = {});
double distance(const ConformalMetric& metric, DiskPoint p, DiskPoint q, const BvpOptions& options = {},
                const IntegratorConfig& config = {});

}  // namespace focalfree
