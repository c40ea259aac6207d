#pragma once

// Statistics on the flow: correlation decay under the maximal-entropy
// measure, Birkhoff averages along single trajectories, and contraction of
// stable pairs in the d1 metric.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "focalfree/measures.hpp"

namespace focalfree {

// A function on the unit tangent bundle of the surface, written on octagon
// representatives; evaluation reduces into the octagon first, so it is
// invariant under the group by construction.
struct Observable {
  std::string name;
  std::function<double(const UnitTangent&)> rule;
  std::string smoothness;

  double operator()(const FuchsianGroup& group, const UnitTangent& v) const;
  // The local part of a normalized lifted vector is already in the octagon.
  double operator()(const LiftedTangent& v) const { return rule(v.local); }
};

Observable constant_observable(double c);
// cos(angle) times a C^1 bump supported in the inscribed disk of the octagon.
Observable angular_harmonic();
// C^1 smoothed indicator of the hyperbolic disk of the given radius about the
// origin, ramping to zero over `ramp`; radius + ramp must stay inside the
// inscribed disk.
Observable disk_indicator(double radius = 0.5, double ramp = 0.25);

struct CorrelationEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

struct CorrelationOptions {
  int batches = 32;
  IntegratorConfig integrator;
};

// Weighted sample covariance of f and g o phi^t over the samples, with a
// batch-means standard error over contiguous batches.
CorrelationEstimate correlation(const ConformalMetric& metric, const Observable& f, const Observable& g, double t,
                                const std::vector<MMESample>& samples, const CorrelationOptions& options = {});
// Draws N samples from sample_mme(mu, seed) first.
CorrelationEstimate correlation(const ConformalMetric& metric, const Observable& f, const Observable& g, double t,
                                const AtomicBoundaryMeasure& mu, int N, std::uint64_t seed,
                                const CorrelationOptions& options = {}, const SamplerOptions& sampler = {});

struct CorrelationSeries {
  std::vector<double> t_grid;
  std::vector<CorrelationEstimate> estimates;
  int N = 0;
  std::uint64_t seed = 0;
};

// One estimate per grid time on a shared sample set.
CorrelationSeries mixing_curve(const ConformalMetric& metric, const Observable& f, const Observable& g,
                               const std::vector<double>& t_grid, const std::vector<MMESample>& samples,
                               std::uint64_t seed, const CorrelationOptions& options = {});
CorrelationSeries mixing_curve(const ConformalMetric& metric, const Observable& f, const Observable& g,
                               const std::vector<double>& t_grid, const AtomicBoundaryMeasure& mu, int N,
                               std::uint64_t seed, const CorrelationOptions& options = {},
                               const SamplerOptions& sampler = {});

// Weighted sample mean with a batch-means standard error.
CorrelationEstimate space_average(const ConformalMetric& metric, const Observable& f,
                                  const std::vector<MMESample>& samples, int batches = 32);

struct BirkhoffOptions {
  double dt = 0.05;  // quadrature spacing; the trajectory is advanced in steps of dt
  int batches = 32;
  IntegratorConfig integrator;
};

struct BirkhoffResult {
  double average = 0.0;
  double stderr_ = 0.0;  // batch means over consecutive time blocks
  double T = 0.0;
};

// (1/T) int_0^T f(phi^t v) dt by composite Simpson. The deck is dropped after
// every step so long runs never leave the octagon chart.
BirkhoffResult birkhoff_average(const ConformalMetric& metric, const Observable& f, const UnitTangent& v, double T,
                                const BirkhoffOptions& options = {});

// d1(phi^t v, phi^t w) for each grid time (negative times flow backwards).
std::vector<double> stable_contraction_test(const ConformalMetric& metric, const LiftedTangent& v,
                                            const LiftedTangent& w, const std::vector<double>& t_grid,
                                            const IntegratorConfig& config = {});

}  // namespace focalfree
