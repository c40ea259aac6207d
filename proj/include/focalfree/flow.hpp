#pragma once

// Geodesic flow, perpendicular Jacobi fields, focal-point and rank detection,
// and the metric d1 on the unit tangent bundle.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "focalfree/integrator.hpp"
#include "focalfree/lifted.hpp"
#include "focalfree/metric.hpp"

namespace focalfree {

// Closed form (chunked isometries) when metric.closed_form(), else adaptive ODE.
LiftedTangent flow(const ConformalMetric& metric, const LiftedTangent& v, double t,
                   const IntegratorConfig& config = {});
// Plain model coordinates in and out; only sensible while the result stays
// well inside the disk.
UnitTangent flow(const ConformalMetric& metric, const UnitTangent& v, double t, const IntegratorConfig& config = {});

struct JacobiState {
  double j = 0.0;
  double jp = 0.0;
};

JacobiState jacobi_evolve(const ConformalMetric& metric, const LiftedTangent& v, JacobiState j0, double t,
                          const IntegratorConfig& config = {});
JacobiState jacobi_evolve(const ConformalMetric& metric, const UnitTangent& v, JacobiState j0, double t,
                          const IntegratorConfig& config = {});

struct FocalCheck {
  bool pass = true;
  std::optional<double> witness_time;
};

// J(0) = 0, J'(0) = 1; requires d/dt j^2 > 0 at n_samples equally spaced
// times in (0, T].
FocalCheck no_focal_check(const ConformalMetric& metric, const LiftedTangent& v, double T, int n_samples = 512,
                          const IntegratorConfig& config = {});
FocalCheck no_focal_check(const ConformalMetric& metric, const UnitTangent& v, double T, int n_samples = 512,
                          const IntegratorConfig& config = {});

struct CertificationOptions {
  int n_vectors = 100;  // random Liouville vectors in the octagon
  double T = 10.0;
  int n_samples = 512;
  std::uint64_t seed = 1;
};

// Random vectors plus deterministic probes through the bump. The returned
// status can be attached with ConformalMetric::with_certification.
CertificationStatus certify_no_focal(const ConformalMetric& metric, const CertificationOptions& options = {},
                                     const IntegratorConfig& config = {});
ConformalMetric certified(const ConformalMetric& metric, const CertificationOptions& options = {},
                          const IntegratorConfig& config = {});

// Gaussian curvature at n equally spaced times in [t0, t1].
std::vector<double> curvature_trace(const ConformalMetric& metric, const LiftedTangent& v, double t0, double t1,
                                    int n, const IntegratorConfig& config = {});
// 2 iff every sample satisfies |K| < tol.
int rank_estimate(std::span<const double> trace, double tol = 1e-8);

// max over t in [0, 1] of d(gamma_v(t), gamma_w(t)): 65-point grid plus
// golden-section refinement around the largest sample.
double knieper_d1(const ConformalMetric& metric, const LiftedTangent& v, const LiftedTangent& w,
                  const IntegratorConfig& config = {});

}  // namespace focalfree
