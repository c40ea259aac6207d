#pragma once

// Patterson-Sullivan measures from truncated Poincare series, the critical
// exponent (entropy estimate), Gromov products, and a sampler for the
// measure of maximal entropy built from the geodesic current.

#include <cstdint>
#include <vector>

#include "focalfree/boundary.hpp"
#include "focalfree/rng.hpp"

namespace focalfree {

// Word cache used for orbit sums (word length 10, displacement radius 12).
// The metric's own cache is only large enough for reductions.
const FuchsianGroup& orbit_group();

// Orbit points alpha(q) with word length <= L and hyperbolic displacement
// d(0, alpha 0) in [r_min, r_max], each with its distance d(p, alpha q) in the
// metric. Numeric metrics solve one BVP per element.
struct OrbitPoint {
  std::size_t element = 0;  // index into orbit_group().elements()
  double distance = 0.0;
};
std::vector<OrbitPoint> orbit_distances(const ConformalMetric& metric, DiskPoint p, DiskPoint q, int L, double r_min,
                                        double r_max, const IntegratorConfig& config = {});

// Sum over |alpha| <= L of exp(-s d(p, alpha q)), cut at displacement r_max
// (defaults to the whole cache).
double poincare_series(const ConformalMetric& metric, double s, DiskPoint p, DiskPoint q, int L,
                       double r_max = -1.0, const IntegratorConfig& config = {});
// Partial sums over displacement balls of the given radii (nondecreasing).
std::vector<double> poincare_partial_sums(const ConformalMetric& metric, double s, DiskPoint p, DiskPoint q, int L,
                                          const std::vector<double>& radii, const IntegratorConfig& config = {});

struct EntropyOptions {
  double r_lo = 5.0;   // fit window for log N(R)
  double r_hi = 10.0;
  double r_step = 0.25;
};

struct EntropyEstimate {
  double h = 0.0;
  double residual = 0.0;  // rms deviation of log N(R) from the fitted line
  int points = 0;
};

// Least-squares slope of log N(R) against R, N(R) = #{alpha : d(p, alpha p) <= R}.
EntropyEstimate critical_exponent(const ConformalMetric& metric, DiskPoint p, int L, const EntropyOptions& options = {},
                                  const IntegratorConfig& config = {});

struct BoundaryAtom {
  BoundaryPoint xi;
  double weight = 0.0;
};

struct AtomicBoundaryMeasure {
  std::vector<BoundaryAtom> atoms;
  DiskPoint base_point;
  double exponent = 0.0;  // critical exponent estimate h
  int L = 0;
  double s = 0.0;         // series parameter

  double total() const;
  // Mass per angular bin [2 pi k / bins, 2 pi (k + 1) / bins).
  std::vector<double> binned(int bins = 16) const;
  // Atoms moved by m, weights unchanged.
  AtomicBoundaryMeasure pushforward(const Mobius& m) const;
};

struct PsOptions {
  DiskPoint q{0.0, 0.0};  // orbit base point
  // Atoms come from the orbit shell r_out - width <= d(0, alpha 0) <= r_out. A
  // wider shell puts half the mass on few heavy inner atoms, and the resulting
  // current is visibly not flow invariant on the surface at N ~ 1e4 samples.
  double r_out = 12.0;
  double width = 2.0;
  double s_offset = 0.05;  // s = h + s_offset when s is not given
};

// Atoms at the hyperbolic direction of alpha(q) seen from p, with weights
// exp(-s d(p, alpha q)) divided by the same shell sum taken from q, so that
// mu_q has total mass 1 and base points can be compared.
AtomicBoundaryMeasure ps_measure(const ConformalMetric& metric, DiskPoint p, int L, double s, double h,
                                 const PsOptions& options = {}, const IntegratorConfig& config = {});
// s = h + s_offset with h from critical_exponent.
AtomicBoundaryMeasure ps_measure(const ConformalMetric& metric, DiskPoint p, int L, const PsOptions& options = {},
                                 const EntropyOptions& entropy = {}, const IntegratorConfig& config = {});

// beta_p(xi, eta) = -(b_p(q, xi) + b_p(q, eta)) with q = g.at(t) on the
// connecting geodesic g.
double gromov_product(const ConformalMetric& metric, const LiftedPoint& p, const Geodesic& g, double t = 0.0,
                      const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
// q = anchor of connect(xi, eta).
double gromov_product(const ConformalMetric& metric, DiskPoint p, BoundaryPoint xi, BoundaryPoint eta,
                      const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

struct CurrentSample {
  BoundaryPoint xi, eta;
  double weight = 0.0;  // exp(h beta_p(xi, eta))
};

struct MMESample {
  UnitTangent tangent;  // base point in the octagon
  CurrentSample source;
  double time = 0.0;    // parameter on the connecting geodesic, from its anchor
};

struct SamplerOptions {
  // Tolerances for the numeric connect and Busemann values; sampling noise
  // dominates long before these do.
  BoundaryOptions boundary = loose_boundary();
  double prefilter_margin = 1.0;  // extra hyperbolic distance allowed for non-hyperbolic metrics
  double max_rejection = 0.99;
  static BoundaryOptions loose_boundary();
};

// Draws (xi, eta) from the atom product, keeps pairs whose geodesic can meet
// the octagon and has rank 1, picks a uniform time in a window covering the
// octagon and keeps the vector if it lies in the octagon. Sample i uses the
// stream derive_seed(seed, i), so results do not depend on evaluation order.
std::vector<MMESample> sample_mme(const ConformalMetric& metric, const AtomicBoundaryMeasure& mu, int n,
                                  std::uint64_t seed, const SamplerOptions& options = {},
                                  const IntegratorConfig& config = {});

// Liouville measure on the octagon: uniform hyperbolic point and angle,
// weighted by the area factor exp(2u).
std::vector<MMESample> sample_liouville(const ConformalMetric& metric, int n, std::uint64_t seed);

}  // namespace focalfree
