#include "focalfree/boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/tools/toms748_solve.hpp>

#include "focalfree/distance.hpp"
#include "focalfree/flow.hpp"

namespace focalfree {

namespace {

// Horofunction of the image point m(w) toward zeta, without forming m(w):
// with a = m^-1(zeta), |zeta - m(w)|^2 = |a - w|^2 / (|den(a)|^2 |den(w)|^2).
double horofunction_image(const Mobius& m, Complex w, BoundaryPoint zeta) {
  const Complex a = m.inverse().apply(zeta).z();
  return horofunction(w, a) - std::log(m.denominator_norm(a));
}

BoundaryPoint osculating_endpoint(const LiftedTangent& v) {
  return v.deck.apply(Mobius::frame(v.local).apply(BoundaryPoint{0.0}));
}

// Direction at p (in p's chart) of the hyperbolic ray toward xi.
double hyperbolic_aim(const LiftedPoint& p, BoundaryPoint xi) {
  return direction_to(p.local.z(), p.deck.inverse().apply(xi).z());
}

double metric_scale(const ConformalMetric& metric, const LiftedTangent& v) {
  return metric.closed_form() ? 1.0 : std::exp(metric.u(v.local.base.z()));
}

template <class F>
std::pair<double, double> bracket_increasing(F&& f, double x0, double f0, double step, double max_step) {
  // f increasing; returns [lo, hi] with f(lo) <= 0 <= f(hi).
  const double dir = f0 > 0.0 ? -1.0 : 1.0;
  double x1 = x0 + dir * step;
  double f1 = f(x1);
  while (f1 * f0 > 0.0) {
    step *= 2.0;
    if (step > max_step) throw SolverFailure("could not bracket a root", f1);
    x1 = x0 + dir * step;
    f1 = f(x1);
  }
  return {std::min(x0, x1), std::max(x0, x1)};
}

}  // namespace

BoundaryOptions truncation_from(const BoundaryOptions& options, double start) {
  BoundaryOptions out = options;
  out.busemann_T = std::max(4.0, options.busemann_T - 0.5 * start);
  out.busemann_T_max = std::max(out.busemann_T, options.busemann_T_max - 0.5 * start);
  return out;
}

double BoundaryOptions::ray_horizon() const { return 2.0 * busemann_T_max + ray_margin; }

void BoundaryOptions::validate() const {
  if (!(busemann_T > 0.0) || !(busemann_tol > 0.0)) throw DomainError("busemann_T and busemann_tol must be positive");
  if (!(busemann_T_max >= busemann_T)) throw DomainError("busemann_T_max must be at least busemann_T");
  if (!(endpoint_cutoff > 0.0 && endpoint_cutoff < 1.0)) throw DomainError("endpoint_cutoff must lie in (0, 1)");
  if (!(aim_tol > 0.0) || !(connect_tol > 0.0) || !(lift_window > 0.0) || !(ray_margin >= 0.0))
    throw DomainError("boundary tolerances must be positive");
}

// ---------------------------------------------------------------- Ray

struct Ray::Data {
  ConformalMetric metric;
  GeodesicIntegrator integ;
  std::vector<LiftedTangent> states;
};

Ray::Ray(const ConformalMetric& metric, const LiftedTangent& start, double horizon, const IntegratorConfig& config)
    : start_(normalize(metric.group(), start)), closed_form_(metric.closed_form()) {
  if (!(horizon > 0.0)) throw DomainError("ray horizon must be positive");
  auto data = std::make_shared<Data>(Data{metric, GeodesicIntegrator(metric, config), {}});
  if (closed_form_) {
    horizon_ = horizon;
  } else {
    step_ = config.fixed_step;
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step_));
    horizon_ = static_cast<double>(n) * step_;
    data->states.reserve(n + 1);
    GeodesicState s{start_, 0.0, 0.0, 0.0};
    data->states.push_back(s.v);
    for (std::size_t k = 0; k < n; ++k) {
      s = data->integ.step(s, step_);
      data->states.push_back(s.v);
    }
  }
  data_ = std::move(data);
}

LiftedTangent Ray::at(double t) const {
  if (!(t >= 0.0)) throw DomainError("Ray::at needs t >= 0");
  if (closed_form_) return flow(data_->metric, start_, t);
  const auto& states = data_->states;
  const auto last = states.size() - 1;
  const auto k = std::min(static_cast<std::size_t>(std::floor(t / step_)), last);
  const double dt = t - static_cast<double>(k) * step_;
  if (dt <= 0.0) return states[k];
  const GeodesicState s{states[k], 0.0, 0.0, 0.0};
  // Past the horizon the ray keeps stepping on the same grid.
  if (dt > step_) return data_->integ.advance_fixed(s, dt).v;
  return data_->integ.step(s, dt).v;
}

BoundaryPoint Ray::endpoint() const {
  if (closed_form_) return osculating_endpoint(start_);
  return osculating_endpoint(data_->states.back());
}

// ---------------------------------------------------------------- Geodesic

Geodesic::Geodesic(const ConformalMetric& metric, const LiftedTangent& anchor, double horizon,
                   const IntegratorConfig& config)
    : forward_(metric, anchor, horizon, config), backward_(metric, anchor.reversed(), horizon, config) {}

LiftedTangent Geodesic::at(double t) const {
  const double u = t + shift_;
  if (u >= 0.0) return forward_.at(u);
  return backward_.at(-u).reversed();
}

Geodesic Geodesic::reversed() const {
  Geodesic g;
  g.forward_ = backward_;
  g.backward_ = forward_;
  g.shift_ = -shift_;
  return g;
}

Geodesic Geodesic::shifted(double s) const {
  Geodesic g = *this;
  g.shift_ += s;
  return g;
}

RayView view(const Geodesic& g, double s) {
  return [g, s](double t) { return g.at(s + t); };
}

RayView view(const Ray& r) {
  return [r](double t) { return r.at(t); };
}

// ---------------------------------------------------------------- endpoints

BoundaryPoint endpoint(const ConformalMetric& metric, const LiftedTangent& v, int sign,
                       const BoundaryOptions& options, const IntegratorConfig& config) {
  options.validate();
  const LiftedTangent start = normalize(metric.group(), sign > 0 ? v : v.reversed());
  if (metric.closed_form()) return osculating_endpoint(start);
  // Step until the model radius of the resolved point reaches the cutoff.
  const double margin = 1.0 - options.endpoint_cutoff * options.endpoint_cutoff;
  GeodesicIntegrator integ(metric, config);
  GeodesicState s{start, 0.0, 0.0, 0.0};
  auto outside = [&](const LiftedTangent& w) {
    const Complex z = w.local.base.z();
    return (1.0 - std::norm(z)) / w.deck.denominator_norm(z) <= margin;
  };
  while (!outside(s.v)) {
    if (s.time > config.horizon) throw SolverFailure("endpoint: horizon exceeded before the cutoff", s.time);
    s = integ.step(s, config.fixed_step);
  }
  return osculating_endpoint(s.v);
}

BoundaryPoint endpoint(const ConformalMetric& metric, const UnitTangent& v, int sign, const BoundaryOptions& options,
                       const IntegratorConfig& config) {
  return endpoint(metric, LiftedTangent{Mobius::identity(), v}, sign, options, config);
}

Ray aim(const ConformalMetric& metric, const LiftedPoint& p, BoundaryPoint xi, const BoundaryOptions& options,
        const IntegratorConfig& config) {
  options.validate();
  const LiftedPoint pn = normalize(metric.group(), p);
  const double psi0 = hyperbolic_aim(pn, xi);
  const double H = options.ray_horizon();
  auto shoot = [&](double psi) { return Ray(metric, {pn.deck, UnitTangent{pn.local, wrap_two_pi(psi)}}, H, config); };
  if (metric.closed_form()) return shoot(psi0);

  Ray best = shoot(psi0);
  double best_miss = wrap_pi(best.endpoint().theta - xi.theta);
  auto miss = [&](double psi) {
    Ray r = shoot(psi);
    const double m = wrap_pi(r.endpoint().theta - xi.theta);
    if (std::abs(m) < std::abs(best_miss)) {
      best = std::move(r);
      best_miss = m;
    }
    return m;
  };
  if (std::abs(best_miss) <= options.aim_tol) return best;
  // The endpoint is an increasing function of the launch angle.
  const double m0 = best_miss;
  auto [lo, hi] = bracket_increasing(miss, psi0, m0, 2.0 * std::abs(m0) + 1e-15, kPi);
  auto tol = [&](double a, double b) {
    return std::abs(best_miss) <= options.aim_tol || std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a));
  };
  std::uintmax_t iters = 100;
  boost::math::tools::toms748_solve(miss, lo, hi, tol, iters);
  if (std::abs(best_miss) > 1e3 * options.aim_tol) throw SolverFailure("aim did not reach the boundary point", best_miss);
  return best;
}

// ---------------------------------------------------------------- Busemann

double asymptotic_offset(const ConformalMetric& metric, const RayView& a, const RayView& b, double T) {
  const LiftedTangent target = a(T);
  const auto& group = metric.group();
  double s = T;
  double last_step = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; ++iter) {
    const LiftedTangent here = b(s);
    const Mobius rel = relative_deck(group, here.deck, target.deck);
    const double along = frame_offset(here.local, rel, target.local.base.z()).along;
    const double step = along * metric_scale(metric, here);
    s += step;
    if (std::abs(step) < 1e-13 || (iter > 3 && std::abs(step) >= std::abs(last_step))) return s - T;
    last_step = step;
  }
  throw SolverFailure("abeam point did not converge", last_step);
}

namespace {

double closed_form_busemann(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q,
                            BoundaryPoint xi) {
  const LiftedPoint pn = normalize(metric.group(), p), qn = normalize(metric.group(), q);
  const Mobius rel = relative_deck(metric.group(), pn.deck, qn.deck);
  const BoundaryPoint local_xi = pn.deck.inverse().apply(xi);
  return horofunction_image(rel, qn.local.z(), local_xi) - horofunction(pn.local.z(), local_xi.z());
}

// Evaluates value(T) and value(2T), raising T until they agree within
// busemann_tol or T reaches busemann_T_max.
template <class F>
double truncated_limit(F&& value, const BoundaryOptions& options, const char* what) {
  double diff = 0.0;
  for (double T = options.busemann_T;; T = std::min(T + 2.0, options.busemann_T_max)) {
    const double v2 = value(2.0 * T);
    diff = std::abs(value(T) - v2);
    if (diff <= options.busemann_tol) return v2;
    if (T >= options.busemann_T_max) break;
  }
  throw SolverFailure(what, diff);
}

double checked_offset(const ConformalMetric& metric, const RayView& a, const RayView& b, const BoundaryOptions& options) {
  return truncated_limit([&](double T) { return asymptotic_offset(metric, a, b, T); }, options,
                         "Busemann truncation did not converge");
}

}  // namespace

double busemann_views(const ConformalMetric& metric, const RayView& from_p, const RayView& from_q,
                      const BoundaryOptions& options) {
  if (metric.closed_form()) {
    const LiftedTangent p = from_p(0.0);
    return closed_form_busemann(metric, p.point(), from_q(0.0).point(), osculating_endpoint(p));
  }
  return checked_offset(metric, from_p, from_q, options);
}

double busemann(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q, BoundaryPoint xi,
                const BoundaryOptions& options, const IntegratorConfig& config) {
  if (metric.closed_form()) return closed_form_busemann(metric, p, q, xi);
  const Ray from_p = aim(metric, p, xi, options, config);
  return busemann_along(metric, view(from_p), q, xi, options, config);
}

double busemann(const ConformalMetric& metric, DiskPoint p, DiskPoint q, BoundaryPoint xi,
                const BoundaryOptions& options, const IntegratorConfig& config) {
  if (!p.valid() || !q.valid()) throw DomainError("busemann: points must lie in the open disk");
  return busemann(metric, LiftedPoint{Mobius::identity(), p}, LiftedPoint{Mobius::identity(), q}, xi, options, config);
}

double busemann_along(const ConformalMetric& metric, const RayView& from_p, const LiftedPoint& q, BoundaryPoint xi,
                      const BoundaryOptions& options, const IntegratorConfig& config) {
  if (metric.closed_form()) {
    const LiftedTangent p = from_p(0.0);
    return closed_form_busemann(metric, p.point(), q, xi);
  }
  const Ray from_q = aim(metric, q, xi, options, config);
  return checked_offset(metric, from_p, view(from_q), options);
}

// ---------------------------------------------------------------- connect

namespace {

// Hyperbolic geodesic from xi to eta, anchored at its closest point to the origin.
UnitTangent hyperbolic_connect(BoundaryPoint xi, BoundaryPoint eta) {
  const double gap = circular_distance(xi.theta, eta.theta);
  if (gap < 1e-12) throw DomainError("connect: endpoints coincide");
  Complex anchor = 0.0;
  if (gap < kPi) {
    const double rho = std::acosh(1.0 / std::sin(gap / 2.0));
    anchor = std::polar(std::tanh(rho / 2.0), std::arg(xi.z() + eta.z()));
  }
  return {DiskPoint::from(anchor), wrap_two_pi(direction_to(anchor, eta.z()))};
}

// Moves the anchor to the (hyperbolic) closest approach to the origin.
Geodesic anchor_at_origin(const ConformalMetric& metric, const Geodesic& g) {
  return g.shifted(project(metric, g, LiftedPoint{Mobius::identity(), DiskPoint{0.0, 0.0}}).t);
}

}  // namespace

Projection project(const ConformalMetric& metric, const Geodesic& g, const LiftedPoint& x) {
  Projection out;
  for (int iter = 0; iter < 50; ++iter) {
    const LiftedTangent here = g.at(out.t);
    const Mobius rel = relative_deck(metric.group(), here.deck, x.deck);
    const FrameOffset off = frame_offset(here.local, rel, x.local.z());
    const double step = off.along * metric_scale(metric, here);
    out.t += step;
    out.lateral = off.lateral * metric_scale(metric, here);
    if (std::abs(step) < 1e-14) break;
  }
  return out;
}

Geodesic geodesic_through(const ConformalMetric& metric, const LiftedTangent& v, const BoundaryOptions& options,
                          const IntegratorConfig& config) {
  options.validate();
  return Geodesic(metric, v, options.ray_horizon(), config);
}

Geodesic connect(const ConformalMetric& metric, BoundaryPoint xi, BoundaryPoint eta, const BoundaryOptions& options,
                 const IntegratorConfig& config) {
  options.validate();
  const UnitTangent guess = hyperbolic_connect(xi, eta);
  const double H = options.ray_horizon();
  if (metric.closed_form()) return Geodesic(metric, lift(metric, guess), H, config);

  // Walk along the hyperbolic perpendicular through the guess: each point
  // gets the geodesic aimed at eta, and its backward endpoint sweeps
  // monotonically past xi. Endpoints are only Holder in the launch data, so
  // a bracketing solver is used rather than Newton.
  const Mobius frame = Mobius::frame(guess);
  Geodesic best;
  double best_miss = std::numeric_limits<double>::infinity();
  auto miss = [&](double s) {
    const LiftedPoint p = lift(metric, frame.apply(DiskPoint::from(Complex(0.0, std::tanh(s / 2.0)))));
    Geodesic g = geodesic_through(metric, aim(metric, p, eta, options, config).start(), options, config);
    const double m = wrap_pi(g.endpoint(-1).theta - xi.theta);
    if (std::abs(m) < std::abs(best_miss)) {
      best = std::move(g);
      best_miss = m;
    }
    return m;
  };
  const double m0 = miss(0.0);
  if (std::abs(m0) > options.connect_tol) {
    double w = 0.25, lo = 0.0, hi = 0.0, flo = 0.0, fhi = 0.0;
    for (;; w *= 2.0) {
      if (w > 16.0) throw SolverFailure("connect: could not bracket the connecting geodesic", best_miss);
      lo = -w;
      hi = w;
      flo = miss(lo);
      fhi = miss(hi);
      if (flo * fhi <= 0.0) break;
    }
    auto tol = [&](double a, double b) {
      return std::abs(best_miss) <= options.connect_tol || std::abs(b - a) <= 1e-15;
    };
    std::uintmax_t iters = 100;
    boost::math::tools::toms748_solve(miss, lo, hi, flo, fhi, tol, iters);
  }
  if (std::abs(best_miss) > std::max(1e3 * options.connect_tol, 1e-9))
    throw SolverFailure("connect: endpoints not reached", best_miss);
  const Geodesic& g = best;
  return anchor_at_origin(metric, g);
}

// ---------------------------------------------------------------- lifts

double stable_lift_parameter(const ConformalMetric& metric, const RayView& v, const Geodesic& target,
                             const BoundaryOptions& options, const IntegratorConfig& config) {
  (void)config;
  if (metric.closed_form()) {
    // b_v(target(s), xi) = b_v(target(0), xi) - s exactly.
    const LiftedTangent start = v(0.0);
    return closed_form_busemann(metric, start.point(), target.at(0.0).point(), target.endpoint(1));
  }
  auto root = [&](double T) {
    auto f = [&](double s) { return asymptotic_offset(metric, v, view(target, s), T); };
    const double f0 = f(0.0);
    // f decreases with unit slope, so f0 is the first guess for the root.
    double lo = f0 - 0.5, hi = f0 + 0.5;
    if (std::abs(f0) > options.lift_window) throw SolverFailure("stable lift: root outside the search window", f0);
    double flo = f(lo), fhi = f(hi);
    if (flo * fhi > 0.0) throw SolverFailure("stable lift: root not bracketed", std::min(std::abs(flo), std::abs(fhi)));
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-13; };
    std::uintmax_t iters = 60;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (r.first + r.second);
  };
  return truncated_limit(root, options, "stable lift: truncation did not converge");
}

double unstable_lift_parameter(const ConformalMetric& metric, const Geodesic& source, double s, const Geodesic& target,
                               const BoundaryOptions& options, const IntegratorConfig& config) {
  return -stable_lift_parameter(metric, view(source.reversed(), -s), target.reversed(), options, config);
}

LiftedTangent stable_lift(const ConformalMetric& metric, const LiftedTangent& v, const Geodesic& target,
                          const BoundaryOptions& options, const IntegratorConfig& config) {
  const BoundaryPoint xi = target.endpoint(1);
  const BoundaryPoint own = endpoint(metric, v, 1, options, config);
  if (circular_distance(own.theta, xi.theta) > 1e-4)
    throw DomainError("stable_lift: target does not share the forward endpoint");
  if (metric.closed_form()) {
    const double s = stable_lift_parameter(metric, [&](double) { return v; }, target, options, config);
    return target.at(s);
  }
  // Re-aim from the base point so that both rays end exactly at xi.
  const Ray from_v = aim(metric, v.point(), xi, options, config);
  return target.at(stable_lift_parameter(metric, view(from_v), target, options, config));
}

LiftedTangent unstable_lift(const ConformalMetric& metric, const LiftedTangent& v, const Geodesic& target,
                            const BoundaryOptions& options, const IntegratorConfig& config) {
  return stable_lift(metric, v.reversed(), target.reversed(), options, config).reversed();
}

// ---------------------------------------------------------------- checks

bool asymptotic_check(const ConformalMetric& metric, const Geodesic& g1, const Geodesic& g2, int sign, double T,
                      double C, int samples, const IntegratorConfig& config) {
  if (!(T > 0.0)) throw DomainError("asymptotic_check needs T > 0");
  if (samples < 2) throw DomainError("asymptotic_check needs at least two samples");
  const double dir = sign > 0 ? 1.0 : -1.0;
  for (int i = 0; i < samples; ++i) {
    const double t = dir * T * i / (samples - 1);
    if (distance(metric, g1.at(t).point(), g2.at(t).point(), {}, config) > C + 1e-9) return false;
  }
  return true;
}

bool cone_contains(const ConformalMetric& metric, const TruncatedCone& tc, const LiftedPoint& x,
                   const IntegratorConfig& config) {
  const LiftedTangent axis = normalize(metric.group(), tc.axis);
  const BvpSolution sol = solve_bvp(metric, axis.point(), x, {}, config);
  if (sol.distance <= tc.r) return false;
  return circular_distance(sol.launch.local.angle, axis.local.angle) < tc.epsilon;
}

bool cone_contains(const ConformalMetric& metric, const TruncatedCone& tc, BoundaryPoint xi,
                   const BoundaryOptions& options, const IntegratorConfig& config) {
  const LiftedTangent axis = normalize(metric.group(), tc.axis);
  const Ray r = aim(metric, axis.point(), xi, options, config);
  return circular_distance(r.start().local.angle, axis.local.angle) < tc.epsilon;
}

std::vector<LiftedTangent> horosphere_points(const ConformalMetric& metric, const Horosphere& h, int n, double spread,
                                             const BoundaryOptions& options, const IntegratorConfig& config) {
  if (n < 1) throw DomainError("horosphere_points needs n >= 1");
  const LiftedPoint anchor = normalize(metric.group(), h.anchor);
  const Ray from_anchor = aim(metric, anchor, h.center, options, config);
  const double across = from_anchor.start().local.angle + kPi / 2.0;
  const Mobius chart = Mobius::to_point(anchor.local.z());
  std::vector<LiftedTangent> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double o = n == 1 ? 0.0 : spread * (static_cast<double>(i) / (n - 1) - 0.5);
    // Base points spread along the hyperbolic geodesic across the ray.
    const Complex q = chart(std::polar(std::tanh(o / 2.0), across));
    const LiftedPoint qp{anchor.deck, DiskPoint::from(q)};
    const Ray toward = aim(metric, qp, h.center, options, config);
    const Geodesic g = geodesic_through(metric, toward.start(), options, config);
    out.push_back(g.at(stable_lift_parameter(metric, view(from_anchor), g, options, config)));
  }
  return out;
}

// ---------------------------------------------------------------- circle dynamics

double minimality_gap(const FuchsianGroup& group, BoundaryPoint xi, int L) {
  if (L < 0) throw DomainError("minimality_gap needs L >= 0");
  std::vector<double> angles;
  for (const auto& e : group.elements()) {
    if (e.length > L) break;
    angles.push_back(e.m.apply(xi).theta);
  }
  std::sort(angles.begin(), angles.end());
  double gap = kTwoPi - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap;
}

bool Arc::contains(BoundaryPoint p) const { return circular_distance(p.theta, center.theta) <= half_width; }

bool north_south_check(const Mobius& alpha, const Arc& U, const Arc& V, int N, int samples) {
  if (N < 0 || samples < 1) throw DomainError("north_south_check needs N >= 0 and samples >= 1");
  for (int i = 0; i < samples; ++i) {
    BoundaryPoint p{kTwoPi * i / samples};
    if (U.contains(p)) continue;
    for (int n = 0; n < N; ++n) p = alpha.apply(p);
    for (int n = N; n <= N + 10; ++n) {
      if (!V.contains(p)) return false;
      p = alpha.apply(p);
    }
  }
  return true;
}

int north_south_threshold(const Mobius& alpha, const Arc& U, const Arc& V, int max_n, int samples) {
  for (int n = 0; n <= max_n; ++n)
    if (north_south_check(alpha, U, V, n, samples)) return n;
  return -1;
}

}  // namespace focalfree
