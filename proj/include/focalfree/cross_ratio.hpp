#pragma once

// Cross ratio of four boundary points, three ways: the finite-point limit,
// horosphere segment lengths, and the holonomy of the stable/unstable cycle.
//
// Argument order is (xi, eta, xi', eta'). The primary pair is
// {gamma(xi, eta), gamma(xi', eta')} and the cross pair is
// {gamma(xi, eta'), gamma(xi', eta)}:
//   Cr = lim d(p, q) + d(p', q') - d(p, q') - d(p', q)
// with p, q -> xi, eta and p', q' -> xi', eta'.

#include <array>

#include "focalfree/boundary.hpp"
#include "focalfree/rng.hpp"

namespace focalfree {

struct Quadrilateral {
  BoundaryPoint xi, eta, xi_p, eta_p;
  Geodesic xi_eta, xip_etap, xi_etap, xip_eta;
  std::array<int, 4> ranks{1, 1, 1, 1};  // rank estimate of each geodesic, in the order above
};

Quadrilateral make_quadrilateral(const ConformalMetric& metric, BoundaryPoint xi, BoundaryPoint eta,
                                 BoundaryPoint xi_p, BoundaryPoint eta_p, const BoundaryOptions& options = {},
                                 const IntegratorConfig& config = {});

// d(p, q) + d(p', q') - d(p, q') - d(p', q)
double cr_finite(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q, const LiftedPoint& pp,
                 const LiftedPoint& qp, const IntegratorConfig& config = {});

struct CrossRatioOptions {
  // Truncations R, R + R_step, ... up to R_max; consecutive values must agree
  // within tol. Lengths stay near 2 R_max, where lifted decks are still exact.
  double R = 6.0;
  double R_step = 2.0;
  double R_max = 12.0;
  double tol = 1e-4;
  double level_shift = 1.5;  // second horosphere level for the independence check
  double level_tol = 1e-5;
};

// Points at -R and +R on the two primary geodesics.
double cr_limit(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr = {},
                const IntegratorConfig& config = {});
// Same with points at distance R on rays from the origin to each boundary point.
double cr_limit_rays(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr = {},
                     const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

// d1 + d2 - d3 - d4 of the segments between four disjoint horospheres.
double cr_horospheres(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr = {},
                      const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

struct Holonomy {
  double tau = 0.0;
  std::array<double, 5> params{};  // v_k = geodesic_k.at(params[k])
};

// v0 = xi_eta.at(s0); lifts stable onto (xi', eta), unstable onto (xi', eta'),
// stable onto (xi, eta'), unstable back onto (xi, eta).
Holonomy cr_holonomy_cycle(const ConformalMetric& metric, const Quadrilateral& quad, double s0 = 0.0,
                           const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
double cr_holonomy(const ConformalMetric& metric, const Quadrilateral& quad, double s0 = 0.0,
                   const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
// v0 must lie on xi_eta and point forward along it.
double cr_holonomy(const ConformalMetric& metric, const Quadrilateral& quad, const LiftedTangent& v0,
                   const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

struct CrossRatioReport {
  double limit = 0.0;
  double horospheres = 0.0;
  double holonomy = 0.0;
  double spread() const;
};

CrossRatioReport cross_ratio_all(const ConformalMetric& metric, const Quadrilateral& quad,
                                 const CrossRatioOptions& cr = {}, const BoundaryOptions& options = {},
                                 const IntegratorConfig& config = {});

// True when the two primary geodesics cross (the pairs interleave on the circle).
bool primary_geodesics_intersect(const Quadrilateral& quad);

// Four boundary points (xi, eta, xi', eta') with pairwise gaps >= min_gap.
// With intersecting set, xi' and eta' fall on opposite sides of (xi, eta).
std::array<BoundaryPoint, 4> random_quad_points(Rng& rng, bool intersecting = false, double min_gap = 0.3);

// Moves each boundary point in turn by delta and by delta / 2 (horosphere
// method). K is fitted from the delta / 2 changes; the check passes when
// every delta change is below K delta and every change shrinks on halving.
struct ContinuityCheck {
  double base = 0.0;
  double K = 0.0;
  std::array<double, 4> change{}, change_half{};
  bool pass = false;
};
ContinuityCheck cr_continuity(const ConformalMetric& metric, const std::array<BoundaryPoint, 4>& points,
                              double delta = 1e-3, const CrossRatioOptions& cr = {},
                              const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

}  // namespace focalfree
