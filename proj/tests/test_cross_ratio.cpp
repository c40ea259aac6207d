#include <cmath>

#include "doctest.h"
#include "focalfree/cross_ratio.hpp"
#include "focalfree/distance.hpp"
#include "focalfree/flow.hpp"
#include "support.hpp"

using namespace focalfree;
using namespace fftest;

namespace {

// Finite-point expression with closed-form distances, points at distance R
// from the origin on the two diameters.
double orthogonal_oracle(double R) {
  const double r = std::tanh(R / 2);
  const Complex p(-r, 0), q(r, 0), pp(0, -r), qp(0, r);
  return acosh_distance(p, q) + acosh_distance(pp, qp) - acosh_distance(p, qp) - acosh_distance(pp, q);
}

// Hyperbolic cross ratio from boundary positions: acosh(1 + 2A) ~ log 4A and
// the conformal factors cancel in the alternating sum.
double boundary_oracle(const std::array<BoundaryPoint, 4>& b) {
  auto d = [&](int i, int j) { return std::abs(b[i].z() - b[j].z()); };
  return 2.0 * std::log(d(0, 1) * d(2, 3) / (d(0, 3) * d(2, 1)));
}

Quadrilateral make(const ConformalMetric& m, const std::array<BoundaryPoint, 4>& b) {
  return make_quadrilateral(m, b[0], b[1], b[2], b[3]);
}

const std::array<BoundaryPoint, 4> kOrthogonal{BoundaryPoint{kPi}, BoundaryPoint{0.0}, BoundaryPoint{1.5 * kPi},
                                               BoundaryPoint{0.5 * kPi}};

}  // namespace

TEST_CASE("orthogonal diameters") {
  const double oracle = orthogonal_oracle(20.0);
  CHECK(std::abs(oracle - 2 * std::log(2.0)) < 1e-12);
  const auto hyp = ConformalMetric::hyperbolic();
  const auto q = make(hyp, kOrthogonal);
  CHECK(std::abs(cr_limit(hyp, q) - oracle) < 1e-4);
  CHECK(std::abs(cr_limit_rays(hyp, q) - oracle) < 1e-4);
  CHECK(std::abs(cr_horospheres(hyp, q) - oracle) < 1e-4);
  CHECK(std::abs(cr_holonomy(hyp, q) - oracle) < 1e-4);
  // Generic ODE path with amplitude 0.
  const auto gen = hyp.generic();
  const auto qg = make(gen, kOrthogonal);
  const auto all = cross_ratio_all(gen, qg);
  CHECK(std::abs(all.limit - oracle) < 1e-4);
  CHECK(std::abs(all.horospheres - oracle) < 1e-4);
  CHECK(std::abs(all.holonomy - oracle) < 1e-4);
}

TEST_CASE("hyperbolic random quadrilaterals") {
  const auto hyp = ConformalMetric::hyperbolic();
  Rng rng(57);
  for (int i = 0; i < 30; ++i) {
    const auto b = random_quad_points(rng);
    const auto q = make(hyp, b);
    const double oracle = boundary_oracle(b);
    const auto all = cross_ratio_all(hyp, q);
    CHECK(std::abs(all.limit - oracle) < 1e-4);
    CHECK(std::abs(all.horospheres - oracle) < 1e-6);
    CHECK(std::abs(all.holonomy - oracle) < 1e-6);
    CHECK(all.spread() < 1e-4);
    CHECK(std::abs(cr_limit_rays(hyp, q) - all.limit) < 1e-4);
  }
}

TEST_CASE("degenerate quadrilateral") {
  const auto hyp = ConformalMetric::hyperbolic();
  const BoundaryPoint xi{0.4}, eta{2.9};
  for (const auto& m : {hyp, test_bump()}) {
    const auto q = make_quadrilateral(m, xi, eta, xi, eta);
    CHECK(std::abs(cr_limit(m, q)) < 1e-6);
    CHECK(std::abs(cr_horospheres(m, q)) < 1e-6);
    CHECK(std::abs(cr_holonomy(m, q)) < 1e-6);
  }
  // Approaching the degenerate quadrilateral the value goes to zero.
  double previous = INFINITY;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const double v = std::abs(cr_horospheres(hyp, make_quadrilateral(hyp, xi, eta, BoundaryPoint{xi.theta + eps},
                                                                     BoundaryPoint{eta.theta - eps})));
    CHECK(v < previous);
    previous = v;
  }
  CHECK(previous < 1e-2);
}

TEST_CASE("level and base vector independence") {
  const auto hyp = ConformalMetric::hyperbolic();
  const auto bump = test_bump();
  for (const auto& m : {hyp.generic(), bump}) {
    const auto q = make(m, kOrthogonal);
    CrossRatioOptions other;
    other.level_shift = 3.0;
    CHECK(std::abs(cr_horospheres(m, q) - cr_horospheres(m, q, other)) < 1e-5);
    const double t0 = cr_holonomy(m, q, 0.0);
    CHECK(std::abs(cr_holonomy(m, q, 1.0) - t0) < 1e-6);
    // Same base vector handed over as a tangent vector: v0 and flow(v0, 1).
    const LiftedTangent v0 = q.xi_eta.at(0.0);
    CHECK(std::abs(cr_holonomy(m, q, v0) - t0) < 1e-6);
    CHECK(std::abs(cr_holonomy(m, q, flow(m, v0, 1.0)) - t0) < 1e-6);
    CHECK_THROWS_AS(cr_holonomy(m, q, v0.reversed()), DomainError);
  }
}

TEST_CASE("perturbed metric three methods") {
  const auto bump = test_bump();
  const auto q = make(bump, kOrthogonal);
  CHECK(q.ranks == std::array<int, 4>{1, 1, 1, 1});
  const auto all = cross_ratio_all(bump, q);
  CHECK(all.spread() < 1e-4);
  CHECK(std::abs(cr_limit_rays(bump, q) - all.limit) < 1e-4);
  // The bump changes the value.
  CHECK(std::abs(all.limit - 2 * std::log(2.0)) > 1e-2);
  Rng rng(8);
  const auto b = random_quad_points(rng, true);
  const auto r = cross_ratio_all(bump, make(bump, b));
  CHECK(r.spread() < 1e-4);
  CHECK(r.limit > 1e-6);
}

TEST_CASE("positivity") {
  const auto hyp = ConformalMetric::hyperbolic();
  Rng rng(91);
  for (int i = 0; i < 30; ++i) {
    const auto b = random_quad_points(rng, true);
    const auto q = make(hyp, b);
    CHECK(primary_geodesics_intersect(q));
    CHECK(cr_horospheres(hyp, q) > 1e-6);
    CHECK(cr_limit(hyp, q) > 1e-6);
  }
  // Non-interleaved pairs give negative values in constant curvature.
  const auto q = make_quadrilateral(hyp, BoundaryPoint{0.0}, BoundaryPoint{1.0}, BoundaryPoint{3.0}, BoundaryPoint{4.0});
  CHECK_FALSE(primary_geodesics_intersect(q));
  CHECK(cr_horospheres(hyp, q) < 0.0);
}

TEST_CASE("continuity") {
  const auto hyp = ConformalMetric::hyperbolic();
  Rng rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto b = random_quad_points(rng, true);
    const auto c = cr_continuity(hyp, b);
    CHECK(c.pass);
    CHECK(std::abs(c.base - boundary_oracle(b)) < 1e-6);
    // The fitted constant bounds the derivative of the oracle.
    for (int k = 0; k < 4; ++k) {
      auto moved = b;
      moved[k] = BoundaryPoint{b[k].theta + 1e-6};
      CHECK(std::abs(boundary_oracle(moved) - boundary_oracle(b)) / 1e-6 < c.K);
    }
  }
}

TEST_CASE("period along the holonomy cycle") {
  const auto bump = test_bump();
  const auto q = make(bump, kOrthogonal);
  const Holonomy h = cr_holonomy_cycle(bump, q, 0.3);
  const std::array<const Geodesic*, 5> path{&q.xi_eta, &q.xip_eta, &q.xip_etap, &q.xi_etap, &q.xi_eta};
  std::array<LiftedTangent, 5> v;
  for (int k = 0; k < 5; ++k) v[k] = path[k]->at(h.params[k]);

  // Endpoint buckets: each stable lift keeps the forward endpoint, each
  // unstable lift keeps the backward one.
  auto bucket = [&](const LiftedTangent& w, int sign) {
    return static_cast<int>(std::floor(endpoint(bump, w, sign).theta / kTwoPi * 64.0));
  };
  CHECK(bucket(v[1], 1) == bucket(v[0], 1));
  CHECK(bucket(v[2], -1) == bucket(v[1], -1));
  CHECK(bucket(v[3], 1) == bucket(v[2], 1));
  CHECK(bucket(v[4], -1) == bucket(v[3], -1));

  // A function invariant along both foliations, defined on v0 and carried
  // along the cycle, takes the same value at v4; v4 is v0 moved by the flow,
  // so the value repeats after the cross ratio.
  auto f = [&](const LiftedTangent& w) { return bucket(w, 1) * 64 + bucket(w, -1); };
  int carried = f(v[0]);
  CHECK(f(v[4]) == carried);
  const LiftedTangent moved = flow(bump, v[0], -h.tau);
  CHECK(hyperbolic_distance(bump.group(), moved.point(), v[4].point()) < 1e-6);
  CHECK(f(moved) == carried);
  CHECK(std::abs(h.tau - cr_limit(bump, q)) < 1e-4);
}
