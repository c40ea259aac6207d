#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "focalfree/distance.hpp"
#include "focalfree/group.hpp"
#include "focalfree/lifted.hpp"
#include "support.hpp"

using namespace focalfree;
using namespace fftest;

TEST_CASE("mobius maps keep the determinant and compose") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Mobius f = Mobius::to_point(random_point(rng, 0.9).z()) * Mobius::rotation(rng.uniform(0, kTwoPi));
    const Mobius g = Mobius::frame({random_point(rng, 0.8), rng.uniform(0, kTwoPi)});
    const Mobius h = Mobius::translation(rng.uniform(-3, 3));
    CHECK(std::abs(f.determinant() - 1.0) < 1e-12);
    CHECK(((f * g) * h).distance_to(f * (g * h)) < 1e-12);
    CHECK((f.inverse() * f).distance_to(Mobius::identity()) < 1e-12);
  }
}

TEST_CASE("mobius_apply examples") {
  const DiskPoint p{0.3, -0.2};
  const DiskPoint same = Mobius::identity().apply(p);
  CHECK(same.x == p.x);
  CHECK(same.y == p.y);
  const DiskPoint r = Mobius::rotation(kPi / 2).apply(DiskPoint{0.5, 0.0});
  CHECK(std::abs(r.x) < 1e-15);
  CHECK(std::abs(r.y - 0.5) < 1e-15);
  const auto group = genus2_group({4, 13.0});
  for (const Mobius& a : group->generators()) {
    const double d = acosh_distance(a(0.0), a(0.5));
    CHECK(std::abs(d - std::log(3.0)) < 1e-10);
  }
  // Boundary goes to boundary.
  const BoundaryPoint xi = group->generators()[2].apply(BoundaryPoint{1.0});
  CHECK(std::abs(std::abs(xi.z()) - 1.0) < 1e-15);
}

TEST_CASE("hyperbolic distance") {
  const auto metric = ConformalMetric::hyperbolic();
  CHECK(distance(metric, DiskPoint{0.2, 0.1}, DiskPoint{0.2, 0.1}) == 0.0);
  CHECK(std::abs(distance(metric, DiskPoint{0, 0}, DiskPoint{0.5, 0}) - 1.0986122886681098) < 1e-12);
  CHECK(std::abs(distance(metric.generic(), DiskPoint{0, 0}, DiskPoint{0.5, 0}) - std::log(3.0)) < 1e-8);
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Complex z = random_point(rng, 0.95).z(), w = random_point(rng, 0.95).z();
    CHECK(std::abs(hyperbolic_distance(z, w) - acosh_distance(z, w)) < 1e-9 * (1 + acosh_distance(z, w)));
  }
}

TEST_CASE("genus-2 group geometry") {
  const auto group = genus2_group({4, 13.0});
  Mobius rel = Mobius::identity();
  for (int k : FuchsianGroup::relator) rel = rel * group->generators()[k];
  CHECK(rel.distance_to(Mobius::identity()) < 1e-10);

  // Right triangle (center, edge midpoint, vertex) with angles pi/8 and pi/8.
  const double expected_R = std::acosh(1.0 / std::tan(kPi / 8) / std::tan(kPi / 8));
  CHECK(std::abs(expected_R - 2.4485) < 1e-4);
  for (const DiskPoint& v : group->fd_vertices()) CHECK(std::abs(acosh_distance(0.0, v.z()) - expected_R) < 1e-10);

  // Interior angle at each vertex from the tangents of the two incident sides.
  // Side k is the perpendicular bisector of 0 and g_k(0); its tangent at the
  // vertex is perpendicular to the direction toward g_k(0).
  const auto& V = group->fd_vertices();
  for (int k = 0; k < 8; ++k) {
    // Vertex k sits between sides k and k+1.
    const Complex v = V[k].z();
    const double to_center = direction_to(v, 0.0);
    const double side_a = direction_to(v, V[(k + 7) % 8].z());
    const double side_b = direction_to(v, V[(k + 1) % 8].z());
    const double angle = circular_distance(side_a, side_b);
    CHECK(std::abs(angle - kPi / 4) < 1e-10);
    CHECK(std::abs(circular_distance(to_center, side_a) - kPi / 8) < 1e-10);
  }
}

namespace {

std::vector<Mobius> brute_force_words(const FuchsianGroup& group, int max_len) {
  std::vector<Mobius> out{Mobius::identity()};
  std::vector<Mobius> frontier{Mobius::identity()};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Mobius> next;
    for (const auto& m : frontier)
      for (const auto& g : group.generators()) next.push_back((m * g).renormalized());
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("word cache matches brute-force enumeration") {
  const auto group = genus2_group({4, 13.0});
  const auto words = brute_force_words(*group, 4);
  // Distinct orbit points by brute force.
  std::vector<Complex> pts;
  for (const auto& m : words) {
    const Complex x = m(0.0);
    bool seen = false;
    for (const Complex& y : pts)
      if (acosh_distance(x, y) < 1e-6) {
        seen = true;
        break;
      }
    if (!seen) pts.push_back(x);
  }
  CHECK(group->count_up_to_length(4) == pts.size());
  double min_sep = 1e9;
  const auto& el = group->elements();
  const std::size_t n4 = group->count_up_to_length(4);
  for (std::size_t i = 0; i < n4; ++i)
    for (std::size_t j = i + 1; j < n4; ++j)
      min_sep = std::min(min_sep, acosh_distance(el[i].m(0.0), el[j].m(0.0)));
  CHECK(min_sep > 0.1);
  // Every cached element has its word.
  for (std::size_t i = 0; i < n4; ++i) {
    Mobius m = Mobius::identity();
    for (int k : el[i].word) m = m * group->generators()[k];
    CHECK((m.inverse() * el[i].m).displacement() < 1e-8);
    CHECK(static_cast<int>(el[i].word.size()) == el[i].length);
  }
}

TEST_CASE("word growth and closure under inverses") {
  const auto group = genus2_group({6, 19.0});
  std::vector<double> counts;
  for (int L = 0; L <= 6; ++L) counts.push_back(static_cast<double>(group->count_up_to_length(L)));
  for (int L = 1; L < 6; ++L) {
    const double ratio = (counts[L + 1] - counts[L]) / (counts[L] - counts[L - 1]);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 14.0);
  }
  for (const auto& e : group->elements()) {
    // Entries grow like e^{d/2}, so compare by displacement.
    const auto inv = group->snap(e.m.inverse());
    REQUIRE(inv.has_value());
    CHECK((*inv * e.m).displacement() < 1e-6);
  }
}

TEST_CASE("fd_reduce") {
  const auto group = genus2_group({6, 13.0});
  const Reduction r0 = fd_reduce(*group, {0, 0});
  CHECK(std::abs(r0.point.z()) == 0.0);
  CHECK(r0.alpha.distance_to(Mobius::identity()) == 0.0);
  for (const Mobius& a : group->generators()) {
    const Reduction r = fd_reduce(*group, a.apply(DiskPoint{0, 0}));
    CHECK(std::abs(r.point.z()) < 1e-12);
    CHECK(r.alpha.distance_to(a.inverse()) < 1e-12);
  }
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    Mobius m = Mobius::identity();
    for (int k = 0; k < 6; ++k) m = m * group->generators()[rng.next() % 8];
    const Reduction o = fd_reduce(*group, m.apply(DiskPoint{0, 0}));
    CHECK(group->in_fundamental_domain(o.point.z(), 1e-9));
    CHECK(hyperbolic_distance(o.point.z(), 0.0) < 1e-6);
    const DiskPoint p = m.apply(random_point(rng, 0.3));
    const Reduction r = fd_reduce(*group, p);
    CHECK(group->in_fundamental_domain(r.point.z(), 1e-9));
    // p itself carries a rounding error of order 1e-16 / (1 - |p|^2).
    CHECK(hyperbolic_distance(r.alpha(p.z()), r.point.z()) < 1e-6);
    // Idempotent on the result.
    const Reduction again = fd_reduce(*group, r.point);
    CHECK(again.alpha.distance_to(Mobius::identity()) < 1e-12);
  }
}

TEST_CASE("gauss curvature") {
  const auto hyp = ConformalMetric::hyperbolic();
  CHECK(gauss_curvature(hyp, {0.3, 0.4}) == -1.0);
  for (double c : {-0.7, 0.0, 0.4, 1.3}) {
    ConformalMetric::Jet jet;
    jet.u = c;
    CHECK(std::abs(gauss_curvature(jet) + std::exp(-2 * c)) < 1e-15);
  }

  // Oracle for E = G = lambda^2, F = 0 (Brioschi with vanishing F):
  // K = -(log lambda)_xx + (log lambda)_yy) / lambda^2, derivatives by
  // central differences of the metric coefficient alone.
  const auto metric = test_bump();
  auto log_lambda = [&](double x, double y) { return std::log(metric.conformal_factor({x, y})); };
  const double h = 1e-4;
  const auto group = genus2_group({0, 1.0});
  const double rmax = std::tanh(FuchsianGroup::circumradius() / 2);
  double worst = 0.0;
  int inside = 0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) {
      const double x = -rmax + 2 * rmax * (i + 0.5) / 50, y = -rmax + 2 * rmax * (j + 0.5) / 50;
      if (!group->in_fundamental_domain({x, y})) continue;
      ++inside;
      const double l0 = log_lambda(x, y);
      const double lap = (log_lambda(x + h, y) + log_lambda(x - h, y) + log_lambda(x, y + h) +
                          log_lambda(x, y - h) - 4 * l0) / (h * h);
      const double lam = std::exp(l0);
      const double oracle = -lap / (lam * lam);
      worst = std::max(worst, std::abs(oracle - gauss_curvature(metric, {x, y})));
    }
  CHECK(inside > 1000);
  CHECK(worst < 1e-4);
}

TEST_CASE("bump is gamma-invariant") {
  const auto metric = test_bump();
  const auto group = genus2_group({4, 13.0});
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const DiskPoint p = random_point(rng, 0.7);
    const double u0 = metric.u(p.z());
    for (std::size_t k = 0; k < group->elements().size(); k += 7) {
      const Complex q = group->elements()[k].m(p.z());
      if (1 - std::norm(q) < 1e-6) continue;
      CHECK(std::abs(metric.u(q) - u0) < 1e-9);
    }
  }
  CHECK(metric.u(metric.params().center.z()) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("bump parameters are validated") {
  CHECK_THROWS_AS(ConformalMetric::bump(0.1, {0.0, 0.0}, 1.6), DomainError);
  CHECK_THROWS_AS(ConformalMetric::bump(-0.1, {0.0, 0.0}, 1.0), DomainError);
}

TEST_CASE("triangle inequality and invariance of distance") {
  for (const auto& metric : {ConformalMetric::hyperbolic(), test_bump()}) {
    const bool cheap = metric.closed_form();
    Rng rng(cheap ? 21 : 22);
    const int triples = cheap ? 1000 : 200;
    for (int i = 0; i < triples; ++i) {
      const DiskPoint a = random_point(rng, 0.8), b = random_point(rng, 0.8), c = random_point(rng, 0.8);
      const double ab = distance(metric, a, b), bc = distance(metric, b, c), ac = distance(metric, a, c);
      CHECK(ab + bc - ac >= -1e-9);
      CHECK(std::abs(distance(metric, b, a) - ab) < 1e-9);
    }
    const auto group = genus2_group({1, 4.0});
    const int pairs = cheap ? 100 : 20;
    for (int i = 0; i < pairs; ++i) {
      const DiskPoint p = random_point(rng, 0.6), q = random_point(rng, 0.6);
      const double d = distance(metric, p, q);
      for (const Mobius& g : group->generators())
        CHECK(std::abs(distance(metric, g.apply(p), g.apply(q)) - d) < 1e-9);
    }
  }
}
