#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "focalfree/flow.hpp"
#include "focalfree/measures.hpp"
#include "support.hpp"

using namespace focalfree;
using namespace fftest;

namespace {

const DiskPoint kOrigin{0.0, 0.0};

double total_variation(std::vector<double> a, std::vector<double> b) {
  const double ta = std::accumulate(a.begin(), a.end(), 0.0), tb = std::accumulate(b.begin(), b.end(), 0.0);
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] / ta - b[i] / tb);
  return 0.5 * tv;
}

// Bump in the inscribed disk of the octagon, so it is continuous on the
// surface; paired with the direction it gives a smooth observable on the
// unit tangent bundle.
double octagon_bump(DiskPoint p) {
  const double r = 2.0 * std::atanh(std::abs(p.z())) / FuchsianGroup::inradius();
  return r < 1.0 ? std::pow(1.0 - r * r, 2) : 0.0;
}
double f_radial(const UnitTangent& v) { return octagon_bump(v.base); }
double f_direction(const UnitTangent& v) { return std::cos(v.angle) * octagon_bump(v.base); }

struct Estimate {
  double mean = 0.0, stderr_ = 0.0;
};

// Self-normalized weighted mean of per-sample values with its delta-method
// standard error.
Estimate weighted_mean(const std::vector<MMESample>& s, const std::vector<double>& values) {
  double sw = 0.0, swf = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sw += s[i].source.weight;
    swf += s[i].source.weight * values[i];
  }
  Estimate e;
  e.mean = swf / sw;
  double var = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) var += std::pow(s[i].source.weight * (values[i] - e.mean), 2);
  e.stderr_ = std::sqrt(var) / sw;
  return e;
}

template <class F>
Estimate weighted_mean(const std::vector<MMESample>& s, F f) {
  std::vector<double> values;
  for (const auto& x : s) values.push_back(f(x.tangent));
  return weighted_mean(s, values);
}

// Weighted mean of f(phi^t v) - f(v) over the same samples; its standard
// error is the Monte Carlo error of the invariance check.
template <class F>
Estimate flow_change(const ConformalMetric& m, const std::vector<MMESample>& s, F f, double t) {
  std::vector<double> values;
  for (const auto& x : s) values.push_back(f(flow(m, lift(m, x.tangent), t).local) - f(x.tangent));
  return weighted_mean(s, values);
}

}  // namespace

TEST_CASE("poincare series") {
  const auto hyp = ConformalMetric::hyperbolic();
  const auto bump = test_bump();
  CHECK(poincare_series(hyp, 1.3, kOrigin, kOrigin, 0) == 1.0);
  CHECK(poincare_series(bump, 0.7, DiskPoint{0.1, -0.2}, DiskPoint{0.1, -0.2}, 0) == 1.0);
  // Closed-form orbit distances against the independent formula.
  const auto& elements = orbit_group().elements();
  const DiskPoint p{0.2, 0.1}, q{-0.1, 0.3};
  for (const auto& o : orbit_distances(hyp, p, q, 3, 0.0, 6.0))
    CHECK(std::abs(o.distance - acosh_distance(p.z(), elements[o.element].m(q.z()))) < 1e-9);
  // Termwise monotone in s.
  double previous = INFINITY;
  for (double s : {1.1, 1.3, 1.5, 2.0}) {
    const double v = poincare_series(hyp, s, kOrigin, kOrigin, 6);
    CHECK(v < previous);
    previous = v;
  }
  // Geometric tail in the convergent region.
  const double s6 = poincare_series(hyp, 1.5, kOrigin, kOrigin, 6);
  const double s7 = poincare_series(hyp, 1.5, kOrigin, kOrigin, 7);
  const double s8 = poincare_series(hyp, 1.5, kOrigin, kOrigin, 8);
  CHECK((s8 - s7) / s7 < (s7 - s6) / s6);
  CHECK_THROWS_AS(poincare_series(hyp, 0.0, kOrigin, kOrigin, 2), DomainError);
  CHECK_THROWS_AS(orbit_distances(hyp, kOrigin, kOrigin, 11, 0.0, 5.0), DomainError);
}

TEST_CASE("poincare series ratio test around the exponent") {
  // Increments over unit displacement shells grow by about e^{h - s}.
  const auto hyp = ConformalMetric::hyperbolic();
  const double h = critical_exponent(hyp, kOrigin, 10).h;
  const std::vector<double> radii{8.0, 9.0, 10.0, 11.0, 12.0};
  for (double offset : {-0.2, 0.2}) {
    const auto sums = poincare_partial_sums(hyp, h + offset, kOrigin, kOrigin, 10, radii);
    for (std::size_t k = 2; k < sums.size(); ++k) {
      const double ratio = (sums[k] - sums[k - 1]) / (sums[k - 1] - sums[k - 2]);
      if (offset < 0)
        CHECK(ratio > 1.0);
      else
        CHECK(ratio < 1.0);
      CHECK(std::abs(std::log(ratio) + offset) < 0.1);
    }
  }
}

TEST_CASE("critical exponent") {
  const auto hyp = ConformalMetric::hyperbolic();
  const auto e = critical_exponent(hyp, kOrigin, 10);
  CHECK(std::abs(e.h - 1.0) < 0.05);
  CHECK(e.points == 21);
  const auto e2 = critical_exponent(hyp, DiskPoint{0.3, 0.2}, 10);
  CHECK(std::abs(e2.h - e.h) < 0.05);
  CHECK_THROWS_AS(critical_exponent(hyp, kOrigin, 3), DomainError);
  EntropyOptions tiny;
  tiny.r_lo = 0.1;
  tiny.r_hi = 0.5;
  tiny.r_step = 0.1;
  CHECK_THROWS_AS(critical_exponent(hyp, kOrigin, 10, tiny), DomainError);

  EntropyOptions small;
  small.r_lo = 4.0;
  small.r_hi = 8.0;
  const auto b = critical_exponent(test_bump(), kOrigin, 10, small);
  CHECK(b.h > 0.0);
  // A nonnegative conformal factor only lengthens curves.
  CHECK(b.h < critical_exponent(hyp, kOrigin, 10, small).h + 1e-12);
}

TEST_CASE("patterson sullivan measure") {
  const auto hyp = ConformalMetric::hyperbolic();
  const auto mu = ps_measure(hyp, kOrigin, 10);
  CHECK(std::abs(mu.total() - 1.0) < 1e-9);
  CHECK(std::abs(mu.s - mu.exponent - 0.05) < 1e-12);
  for (const auto& a : mu.atoms) {
    REQUIRE(a.xi.theta >= 0.0);
    REQUIRE(a.xi.theta < kTwoPi);
    REQUIRE(a.weight > 0.0);
  }
  const auto bins = mu.binned(16);
  CHECK(total_variation(bins, std::vector<double>(16, 1.0)) < 0.1);
  for (double b : bins) CHECK(b > 0.0);

  SUBCASE("cocycle") {
    const DiskPoint p{0.3, 0.0};
    const auto mp = ps_measure(hyp, p, 10, mu.s, mu.exponent);
    const auto bp = mp.binned(16);
    std::vector<double> expected(16, 0.0), mass(16, 0.0);
    const LiftedPoint o{Mobius::identity(), kOrigin}, lp{Mobius::identity(), p};
    for (const auto& a : mu.atoms) {
      const int k = std::min(15, static_cast<int>(a.xi.theta / kTwoPi * 16));
      expected[k] += a.weight * std::exp(-mu.exponent * busemann(hyp, o, lp, a.xi));
      mass[k] += a.weight;
    }
    for (int k = 0; k < 16; ++k) CHECK(std::abs(bp[k] / bins[k] / (expected[k] / mass[k]) - 1.0) < 0.1);
  }

  SUBCASE("equivariance") {
    const Mobius a = orbit_group().generators()[0];
    const auto moved = mu.pushforward(a);
    const auto ma = ps_measure(hyp, DiskPoint::from(a(Complex(0.0))), 10, mu.s, mu.exponent);
    CHECK(total_variation(moved.binned(16), ma.binned(16)) < 0.1);
  }
}

TEST_CASE("patterson sullivan on the bump") {
  const auto bump = test_bump();
  PsOptions small;
  small.r_out = 8.0;
  small.width = 3.0;
  const auto mu = ps_measure(bump, kOrigin, 10, 1.0, 0.95, small);
  CHECK(std::abs(mu.total() - 1.0) < 1e-9);
  for (double b : mu.binned(16)) CHECK(b > 0.0);
}

TEST_CASE("gromov product") {
  const auto hyp = ConformalMetric::hyperbolic();
  const BoundaryPoint xi{0.0}, eta{0.5 * kPi};
  // Closed-form oracle -log(|xi - eta|^2 / 4) from the origin.
  const double oracle = -std::log(std::norm(xi.z() - eta.z()) / 4.0);
  CHECK(std::abs(oracle - std::log(2.0)) < 1e-12);
  CHECK(std::abs(gromov_product(hyp, kOrigin, xi, eta) - oracle) < 1e-9);
  CHECK(std::abs(gromov_product(hyp.generic(), kOrigin, xi, eta) - oracle) < 1e-6);

  for (const auto& m : {hyp.generic(), test_bump()}) {
    const BoundaryPoint a{0.7}, b{3.6};
    const Geodesic g = connect(m, a, b);
    const LiftedPoint o{Mobius::identity(), DiskPoint{0.1, 0.15}};
    const double b0 = gromov_product(m, o, g, 0.0);
    CHECK(std::abs(gromov_product(m, o, g, 1.5) - b0) < 1e-6);
    CHECK(std::abs(gromov_product(m, o, g, -1.0) - b0) < 1e-6);
    CHECK(std::abs(gromov_product(m, o, g.reversed(), 0.0) - b0) < 1e-6);
    CHECK(std::abs(gromov_product(m, g.at(0.8).point(), g, 0.0)) < 1e-6);
  }
}

TEST_CASE("mme sampler") {
  const auto hyp = ConformalMetric::hyperbolic();
  const auto mu = ps_measure(hyp, kOrigin, 10);
  const auto a = sample_mme(hyp, mu, 300, 11);
  const auto b = sample_mme(hyp, mu, 300, 11);
  REQUIRE(a.size() == 300);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].tangent.base.x == b[i].tangent.base.x);
    CHECK(a[i].tangent.base.y == b[i].tangent.base.y);
    CHECK(a[i].tangent.angle == b[i].tangent.angle);
    CHECK(a[i].source.weight == b[i].source.weight);
    CHECK(hyp.group().in_fundamental_domain(a[i].tangent.base.z(), 1e-9));
    CHECK(a[i].source.weight > 0.0);
  }
  // A prefix of a longer run is the shorter run.
  const auto c = sample_mme(hyp, mu, 100, 11);
  CHECK(c.back().tangent.angle == a[99].tangent.angle);

  const auto big = sample_mme(hyp, mu, 4000, 2);
  const auto liouville = sample_liouville(hyp, 4000, 1002);
  for (auto f : {f_radial, f_direction}) {
    const Estimate m = weighted_mean(big, f), l = weighted_mean(liouville, f);
    CHECK(std::abs(m.mean - l.mean) < 2.0 * std::hypot(m.stderr_, l.stderr_));
    for (double s : {0.5, 1.0, 2.0}) {
      const Estimate change = flow_change(hyp, big, f, s);
      CHECK(std::abs(change.mean) < 2.0 * change.stderr_);
    }
  }
  CHECK_THROWS_AS(sample_mme(hyp, mu, 0, 1), DomainError);
}

TEST_CASE("mme flow invariance across seeds") {
  // Each 2-sigma check fails about 5% of the time by chance; over many seeds
  // the failure rate stays near that unless there is a bias.
  const auto hyp = ConformalMetric::hyperbolic();
  const auto mu = ps_measure(hyp, kOrigin, 10);
  int outside = 0, total = 0;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const auto s = sample_mme(hyp, mu, 1000, seed);
    for (double t : {0.5, 1.0, 2.0}) {
      const Estimate c = flow_change(hyp, s, f_radial, t);
      outside += std::abs(c.mean) > 2.0 * c.stderr_;
      ++total;
    }
  }
  CHECK(outside <= total / 5);
}

TEST_CASE("mme sampler on the bump") {
  const auto bump = test_bump();
  PsOptions small;
  small.r_out = 7.0;
  small.width = 2.5;
  const auto mu = ps_measure(bump, kOrigin, 10, 1.0, 0.95, small);
  const auto s = sample_mme(bump, mu, 4, 21);
  for (const auto& x : s) {
    CHECK(bump.group().in_fundamental_domain(x.tangent.base.z(), 1e-9));
    // Rank recomputed independently along the connecting geodesic.
    const Geodesic g = connect(bump, x.source.xi, x.source.eta, SamplerOptions::loose_boundary());
    std::vector<double> trace;
    for (int i = 0; i <= 60; ++i) trace.push_back(gauss_curvature(bump, g.at(-6.0 + 0.2 * i).local.base));
    CHECK(rank_estimate(trace) == 1);
    const UnitTangent v = g.at(x.time).local;
    CHECK(std::abs(v.base.x - x.tangent.base.x) < 1e-9);
    CHECK(std::abs(v.base.y - x.tangent.base.y) < 1e-9);
  }
}
