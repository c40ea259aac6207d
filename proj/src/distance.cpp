#include "focalfree/distance.hpp"

#include <cmath>
#include <limits>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace focalfree {

namespace {

struct Shot {
  double length = 0.0;     // arclength until the target is abeam
  double lateral = 0.0;    // signed lateral miss, metric units
  double mismatch = 0.0;   // visual angle at p between the abeam point and the target
  GeodesicState abeam;
};

class Shooter {
 public:
  Shooter(const ConformalMetric& metric, const IntegratorConfig& config, const LiftedPoint& p, const LiftedPoint& q)
      : metric_(metric), integ_(metric, config), p_(p), q_(q) {
    target_deck_ = relative_deck(metric.group(), p.deck, q.deck);
    target_ = target_deck_(q.local.z());
    hyperbolic_ = hyperbolic_distance(p.local.z(), target_deck_, q.local.z());
    target_direction_ = direction_to(p.local.z(), target_);
    // Generous cap: e^{u} stretches lengths by at most e^{amplitude}.
    max_length_ = 3.0 * std::exp(metric.amplitude()) * hyperbolic_ + 10.0;
  }

  double hyperbolic_guess() const { return hyperbolic_; }
  double target_direction() const { return target_direction_; }

  Shot fire(double psi) const {
    GeodesicState s{LiftedTangent{Mobius::identity(), UnitTangent{p_.local, wrap_two_pi(psi)}}, 0.0, 0.0, 0.0};
    FrameOffset off = offset(s);
    if (off.along <= 0.0) return finish(s, off, psi);
    const double h = integ_.config().fixed_step;
    while (true) {
      GeodesicState next = integ_.step(s, h);
      const FrameOffset next_off = offset(next);
      if (next_off.along <= 0.0) return refine(s, off.along, h, psi);
      s = next;
      off = next_off;
      if (s.time > max_length_) throw SolverFailure("shooting overran the length cap", off.lateral);
    }
  }

 private:
  FrameOffset offset(const GeodesicState& s) const {
    const Mobius rel = relative_deck(metric_.group(), s.v.deck, target_deck_);
    return frame_offset(s.v.local, rel, q_.local.z());
  }

  Shot refine(const GeodesicState& from, double along0, double h, double psi) const {
    // Locate the abeam time inside the last step.
    auto f = [&](double dt) { return dt == 0.0 ? along0 : offset(integ_.step(from, dt)).along; };
    std::uintmax_t iters = 60;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15; };
    double lo = 0.0, hi = h;
    double flo = along0, fhi = f(h);
    if (fhi < 0.0) {
      auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
      lo = r.first;
      hi = r.second;
    } else {
      lo = h;  // abeam exactly at the end of the step
    }
    const double dt = 0.5 * (lo + hi);
    GeodesicState s = dt > 0.0 ? integ_.step(from, dt) : from;
    return finish(s, offset(s), psi);
  }

  Shot finish(const GeodesicState& s, const FrameOffset& off, double psi) const {
    Shot shot;
    shot.abeam = s;
    shot.length = s.time;
    shot.lateral = off.lateral * std::exp(metric_.u(s.v.local.base.z()));
    if (s.time == 0.0) {
      shot.mismatch = wrap_pi(psi - target_direction_);
    } else {
      const Complex here = s.v.deck(s.v.local.base.z());
      shot.mismatch = wrap_pi(direction_to(p_.local.z(), here) - target_direction_);
    }
    return shot;
  }

  const ConformalMetric& metric_;
  GeodesicIntegrator integ_;
  LiftedPoint p_, q_;
  Mobius target_deck_;
  Complex target_;
  double hyperbolic_ = 0.0;
  double target_direction_ = 0.0;
  double max_length_ = 0.0;
};

}  // namespace

BvpSolution solve_bvp(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q,
                      const BvpOptions& options, const IntegratorConfig& config) {
  const LiftedPoint pn = normalize(metric.group(), p);
  const LiftedPoint qn = normalize(metric.group(), q);
  BvpSolution sol;

  if (metric.closed_form()) {
    const Mobius rel = relative_deck(metric.group(), pn.deck, qn.deck);
    sol.distance = hyperbolic_distance(pn.local.z(), rel, qn.local.z());
    const double psi = sol.distance > 0.0 ? direction_to(pn.local.z(), rel(qn.local.z())) : 0.0;
    sol.launch = {pn.deck, UnitTangent{pn.local, psi}};
    return sol;
  }

  Shooter shooter(metric, config, pn, qn);
  if (shooter.hyperbolic_guess() < 1e-14) {
    sol.launch = {pn.deck, UnitTangent{pn.local, 0.0}};
    return sol;
  }

  Shot best;
  double best_psi = shooter.target_direction();
  bool have_best = false;
  int evaluations = 0;
  auto evaluate = [&](double psi) {
    if (++evaluations > options.max_iterations)
      throw SolverFailure("distance BVP exceeded its iteration budget", have_best ? best.lateral : NAN);
    Shot s = shooter.fire(psi);
    if (!have_best || std::abs(s.lateral) < std::abs(best.lateral)) {
      best = s;
      best_psi = psi;
      have_best = true;
    }
    return s.mismatch;
  };

  const double psi0 = shooter.target_direction();
  const double m0 = evaluate(psi0);
  if (std::abs(best.lateral) > options.position_tol * 1e-3 && m0 != 0.0) {
    // Bracket the root of the visual mismatch, then polish with TOMS 748.
    const double sign = m0 > 0.0 ? 1.0 : -1.0;
    double step = 2.0 * std::abs(m0) + 1e-14;
    double psi1 = psi0 - sign * step;
    double m1 = evaluate(psi1);
    while (m1 * m0 > 0.0) {
      step *= 2.0;
      if (step > kPi) throw SolverFailure("distance BVP could not bracket the launch angle", best.lateral);
      psi1 = psi0 - sign * step;
      m1 = evaluate(psi1);
    }
    double lo = std::min(psi0, psi1), hi = std::max(psi0, psi1);
    double flo = psi0 < psi1 ? m0 : m1, fhi = psi0 < psi1 ? m1 : m0;
    auto tol = [&](double a, double b) {
      return std::abs(best.lateral) < options.position_tol * 1e-3 ||
             std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
    };
    std::uintmax_t iters = static_cast<std::uintmax_t>(options.max_iterations);
    boost::math::tools::toms748_solve(evaluate, lo, hi, flo, fhi, tol, iters);
  }

  sol.launch = {pn.deck, UnitTangent{pn.local, wrap_two_pi(best_psi)}};
  sol.residual = std::abs(best.lateral);
  sol.iterations = evaluations;
  // Second-order correction for the remaining lateral miss.
  sol.distance = best.length + (best.length > 0.0 ? 0.5 * best.lateral * best.lateral / std::tanh(best.length) : 0.0);
  // Past the rounding floor the miss only costs residual^2 / 2 in length.
  if (sol.residual > options.position_tol && 0.5 * sol.residual * sol.residual > 1e-10)
    throw SolverFailure("distance BVP did not converge", sol.residual);
  return sol;
}

double distance(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q, const BvpOptions& options,
                const IntegratorConfig& config) {
  return solve_bvp(metric, p, q, options, config).distance;
}

double distance(const ConformalMetric& metric, DiskPoint p, DiskPoint q, const BvpOptions& options,
                const IntegratorConfig& config) {
  if (!p.valid() || !q.valid()) throw DomainError("distance: points must lie in the open disk");
  return distance(metric, LiftedPoint{Mobius::identity(), p}, LiftedPoint{Mobius::identity(), q}, options, config);
}

}  // namespace focalfree
