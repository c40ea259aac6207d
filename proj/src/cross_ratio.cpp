#include "focalfree/cross_ratio.hpp"

#include <algorithm>
#include <cmath>

#include "focalfree/distance.hpp"
#include "focalfree/flow.hpp"

namespace focalfree {

namespace {

int geodesic_rank(const ConformalMetric& metric, const Geodesic& g) {
  if (metric.closed_form()) return 1;
  std::vector<double> trace;
  for (int i = 0; i <= 40; ++i) trace.push_back(gauss_curvature(metric, g.at(-5.0 + 0.25 * i).local.base));
  return rank_estimate(trace);
}

double cr_at(const ConformalMetric& metric, const Quadrilateral& quad, double R, const IntegratorConfig& config) {
  return cr_finite(metric, quad.xi_eta.at(-R).point(), quad.xi_eta.at(R).point(), quad.xip_etap.at(-R).point(),
                   quad.xip_etap.at(R).point(), config);
}

template <class F>
double stepped_limit(F&& value_at, const CrossRatioOptions& cr) {
  if (!(cr.R > 0.0) || !(cr.R_step > 0.0) || !(cr.tol > 0.0) || !(cr.R_max >= cr.R + cr.R_step))
    throw DomainError("cross ratio: need R, R_step, tol > 0 and R_max >= R + R_step");
  double v1 = value_at(cr.R), diff = 0.0;
  for (double R = cr.R + cr.R_step; R <= cr.R_max + 1e-12; R += cr.R_step) {
    const double v2 = value_at(R);
    diff = std::abs(v1 - v2);
    if (diff < cr.tol) return v2;
    v1 = v2;
  }
  throw SolverFailure("cross ratio limit did not converge", diff);
}

// d3 + d4 for horospheres anchored at distance D along the primary geodesics.
// d1 = d2 = 2D by construction.
std::array<double, 2> cross_lengths(const ConformalMetric& metric, const Quadrilateral& q, double D,
                                    const BoundaryOptions& base) {
  const BoundaryOptions options = truncation_from(base, D);
  // Rays from each horosphere anchor toward its center.
  const RayView to_xi = view(q.xi_eta.reversed(), D);
  const RayView to_eta = view(q.xi_eta, D);
  const RayView to_xip = view(q.xip_etap.reversed(), D);
  const RayView to_etap = view(q.xip_etap, D);
  // Segment of gamma between the horospheres at its two ends, measured from its anchor.
  const double d3 = busemann_views(metric, to_xi, view(q.xi_etap.reversed()), options) +
                    busemann_views(metric, to_etap, view(q.xi_etap), options);
  const double d4 = busemann_views(metric, to_xip, view(q.xip_eta.reversed()), options) +
                    busemann_views(metric, to_eta, view(q.xip_eta), options);
  return {d3, d4};
}

// Stable lift of source.at(s) onto target. Busemann functions along a
// geodesic toward its own endpoint shift exactly with the parameter, so the
// lift is computed from where the two geodesics have come close (lateral
// offset below 0.5, at most 8 out from the anchor) and translated back.
double lift_along(const ConformalMetric& metric, const Geodesic& source, double s, const Geodesic& target,
                  const BoundaryOptions& options, const IntegratorConfig& config) {
  double close = 0.0;
  while (close < 8.0 && std::abs(project(metric, target, source.at(close).point()).lateral) > 0.5) close += 0.5;
  const double start = std::max(s, close);
  return stable_lift_parameter(metric, view(source, start), target, truncation_from(options, start), config) +
         (s - start);
}

}  // namespace

Quadrilateral make_quadrilateral(const ConformalMetric& metric, BoundaryPoint xi, BoundaryPoint eta,
                                 BoundaryPoint xi_p, BoundaryPoint eta_p, const BoundaryOptions& options,
                                 const IntegratorConfig& config) {
  Quadrilateral q{xi, eta, xi_p, eta_p, {}, {}, {}, {}, {}};
  q.xi_eta = connect(metric, xi, eta, options, config);
  // The degenerate quadrilateral reuses the same geodesics.
  auto same = [](BoundaryPoint a, BoundaryPoint b) { return circular_distance(a.theta, b.theta) == 0.0; };
  q.xip_etap = same(xi, xi_p) && same(eta, eta_p) ? q.xi_eta : connect(metric, xi_p, eta_p, options, config);
  q.xi_etap = same(eta, eta_p) ? q.xi_eta : same(xi, xi_p) ? q.xip_etap : connect(metric, xi, eta_p, options, config);
  q.xip_eta = same(xi, xi_p) ? q.xi_eta : same(eta, eta_p) ? q.xip_etap : connect(metric, xi_p, eta, options, config);
  q.ranks = {geodesic_rank(metric, q.xi_eta), geodesic_rank(metric, q.xip_etap), geodesic_rank(metric, q.xi_etap),
             geodesic_rank(metric, q.xip_eta)};
  for (int r : q.ranks)
    if (r != 1) throw DomainError("make_quadrilateral: a connecting geodesic has rank 2");
  return q;
}

double cr_finite(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q, const LiftedPoint& pp,
                 const LiftedPoint& qp, const IntegratorConfig& config) {
  auto d = [&](const LiftedPoint& a, const LiftedPoint& b) { return distance(metric, a, b, {}, config); };
  return d(p, q) + d(pp, qp) - d(p, qp) - d(pp, q);
}

double cr_limit(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr,
                const IntegratorConfig& config) {
  return stepped_limit([&](double R) { return cr_at(metric, quad, R, config); }, cr);
}

double cr_limit_rays(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr,
                     const BoundaryOptions& options, const IntegratorConfig& config) {
  const LiftedPoint origin{Mobius::identity(), DiskPoint{0.0, 0.0}};
  const Ray a = aim(metric, origin, quad.xi, options, config), b = aim(metric, origin, quad.eta, options, config);
  const Ray c = aim(metric, origin, quad.xi_p, options, config), d = aim(metric, origin, quad.eta_p, options, config);
  return stepped_limit(
      [&](double R) {
        return cr_finite(metric, a.at(R).point(), b.at(R).point(), c.at(R).point(), d.at(R).point(), config);
      },
      cr);
}

double cr_horospheres(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr,
                      const BoundaryOptions& options, const IntegratorConfig& config) {
  (void)config;
  // Push the anchors out until every segment has positive length, i.e. the
  // horoballs met by each geodesic are disjoint.
  double D = 2.0;
  std::array<double, 2> cross = cross_lengths(metric, quad, D, options);
  while (std::min(cross[0], cross[1]) <= 0.0) {
    D += 2.0;
    if (D > 12.0) throw SolverFailure("could not find disjoint horospheres", std::min(cross[0], cross[1]));
    cross = cross_lengths(metric, quad, D, options);
  }
  const double value = 4.0 * D - cross[0] - cross[1];
  const double D2 = D + cr.level_shift;
  const auto cross2 = cross_lengths(metric, quad, D2, options);
  const double value2 = 4.0 * D2 - cross2[0] - cross2[1];
  if (std::abs(value - value2) > cr.level_tol)
    throw SolverFailure("horosphere cross ratio depends on the level", std::abs(value - value2));
  return value;
}

Holonomy cr_holonomy_cycle(const ConformalMetric& metric, const Quadrilateral& quad, double s0,
                           const BoundaryOptions& options, const IntegratorConfig& config) {
  Holonomy h;
  h.params[0] = s0;
  auto& s = h.params;
  // Unstable lifts are stable lifts of the reversed geodesics.
  s[1] = lift_along(metric, quad.xi_eta, s0, quad.xip_eta, options, config);
  s[2] = -lift_along(metric, quad.xip_eta.reversed(), -s[1], quad.xip_etap.reversed(), options, config);
  s[3] = lift_along(metric, quad.xip_etap, s[2], quad.xi_etap, options, config);
  s[4] = -lift_along(metric, quad.xi_etap.reversed(), -s[3], quad.xi_eta.reversed(), options, config);
  // v4 = flow(v0, s4 - s0). With the lifts in this order that time is -Cr,
  // so the sign is flipped to report the cross ratio itself.
  h.tau = s0 - h.params[4];
  return h;
}

double cr_holonomy(const ConformalMetric& metric, const Quadrilateral& quad, double s0, const BoundaryOptions& options,
                   const IntegratorConfig& config) {
  return cr_holonomy_cycle(metric, quad, s0, options, config).tau;
}

double cr_holonomy(const ConformalMetric& metric, const Quadrilateral& quad, const LiftedTangent& v0,
                   const BoundaryOptions& options, const IntegratorConfig& config) {
  const Projection pr = project(metric, quad.xi_eta, v0.point());
  if (std::abs(pr.lateral) > 1e-6) throw DomainError("cr_holonomy: v0 is not on the (xi, eta) geodesic");
  const LiftedTangent on = quad.xi_eta.at(pr.t);
  const Mobius rel = relative_deck(metric.group(), on.deck, v0.deck);
  if (circular_distance(rel.apply(v0.local).angle, on.local.angle) > 1e-6)
    throw DomainError("cr_holonomy: v0 must point along the (xi, eta) geodesic");
  return cr_holonomy(metric, quad, pr.t, options, config);
}

double CrossRatioReport::spread() const {
  return std::max({limit, horospheres, holonomy}) - std::min({limit, horospheres, holonomy});
}

CrossRatioReport cross_ratio_all(const ConformalMetric& metric, const Quadrilateral& quad, const CrossRatioOptions& cr,
                                 const BoundaryOptions& options, const IntegratorConfig& config) {
  return {cr_limit(metric, quad, cr, config), cr_horospheres(metric, quad, cr, options, config),
          cr_holonomy(metric, quad, 0.0, options, config)};
}

bool primary_geodesics_intersect(const Quadrilateral& quad) {
  // xi' and eta' lie on different arcs cut out by xi and eta.
  auto side = [&](BoundaryPoint p) { return wrap_two_pi(p.theta - quad.xi.theta) < wrap_two_pi(quad.eta.theta - quad.xi.theta); };
  return side(quad.xi_p) != side(quad.eta_p);
}

std::array<BoundaryPoint, 4> random_quad_points(Rng& rng, bool intersecting, double min_gap) {
  if (!(min_gap > 0.0) || min_gap * 4.0 >= kTwoPi) throw DomainError("random_quad_points: bad min_gap");
  for (;;) {
    std::array<double, 4> t;
    for (double& x : t) x = rng.uniform(0.0, kTwoPi);
    bool ok = true;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) ok = ok && circular_distance(t[i], t[j]) >= min_gap;
    if (!ok) continue;
    const std::array<BoundaryPoint, 4> pts{BoundaryPoint{t[0]}, BoundaryPoint{t[1]}, BoundaryPoint{t[2]},
                                           BoundaryPoint{t[3]}};
    Quadrilateral probe;
    probe.xi = pts[0];
    probe.eta = pts[1];
    probe.xi_p = pts[2];
    probe.eta_p = pts[3];
    if (!intersecting || primary_geodesics_intersect(probe)) return pts;
  }
}

ContinuityCheck cr_continuity(const ConformalMetric& metric, const std::array<BoundaryPoint, 4>& points, double delta,
                              const CrossRatioOptions& cr, const BoundaryOptions& options,
                              const IntegratorConfig& config) {
  if (!(delta > 0.0)) throw DomainError("cr_continuity: delta must be positive");
  auto value = [&](const std::array<BoundaryPoint, 4>& p) {
    return cr_horospheres(metric, make_quadrilateral(metric, p[0], p[1], p[2], p[3], options, config), cr, options,
                          config);
  };
  ContinuityCheck out;
  out.base = value(points);
  for (int i = 0; i < 4; ++i) {
    auto moved = points;
    moved[i] = BoundaryPoint{points[i].theta + delta};
    out.change[i] = std::abs(value(moved) - out.base);
    moved[i] = BoundaryPoint{points[i].theta + 0.5 * delta};
    out.change_half[i] = std::abs(value(moved) - out.base);
  }
  constexpr double kFloor = 1e-9;  // below this a change is numerical noise
  out.K = 1.5 * *std::max_element(out.change_half.begin(), out.change_half.end()) / (0.5 * delta) + kFloor / delta;
  out.pass = true;
  for (int i = 0; i < 4; ++i) {
    out.pass = out.pass && out.change[i] < out.K * delta;
    out.pass = out.pass && out.change_half[i] <= 0.75 * out.change[i] + kFloor;
  }
  return out;
}

}  // namespace focalfree
