#include "focalfree/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace focalfree {

namespace odeint = boost::numeric::odeint;
using State = GeodesicIntegrator::State;
using Stepper = odeint::runge_kutta_fehlberg78<State>;

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("integrator tolerances must be > 0");
  if (!(max_step > 0.0) || !(fixed_step > 0.0)) throw DomainError("integrator step sizes must be > 0");
  if (!(horizon > 0.0)) throw DomainError("integrator horizon must be > 0");
  if (method != "rkf78") throw DomainError("unknown integrator method '" + method + "' (supported: rkf78)");
}

GeodesicIntegrator::GeodesicIntegrator(const ConformalMetric& metric, IntegratorConfig config)
    : metric_(metric), config_(std::move(config)) {
  config_.validate();
}

void GeodesicIntegrator::rhs(const State& s, State& ds) const {
  const Complex z(s[0], s[1]);
  const double one_minus = 1.0 - std::norm(z);
  const auto jet = metric_.jet(z);
  const double speed = std::exp(-jet.u) * one_minus / 2.0;
  const double phi_x = jet.ux + 2.0 * s[0] / one_minus;
  const double phi_y = jet.uy + 2.0 * s[1] / one_minus;
  const double c = std::cos(s[2]);
  const double sn = std::sin(s[2]);
  const double K = std::exp(-2.0 * jet.u) * (-1.0 - jet.lap_hyp);
  ds[0] = speed * c;
  ds[1] = speed * sn;
  ds[2] = speed * (phi_y * c - phi_x * sn);
  ds[3] = s[4];
  ds[4] = -K * s[3];
}

GeodesicState GeodesicIntegrator::finish(const GeodesicState& from, const State& x, double dt) const {
  GeodesicState out;
  const LiftedTangent raw{from.v.deck, UnitTangent{DiskPoint{x[0], x[1]}, wrap_two_pi(x[2])}};
  if (!raw.local.base.valid()) throw SolverFailure("geodesic left the disk chart", from.time + dt);
  out.v = normalize(metric_.group(), raw);
  out.j = x[3];
  out.jp = x[4];
  out.time = from.time + dt;
  return out;
}

namespace {

State pack(const GeodesicState& s) {
  return {s.v.local.base.x, s.v.local.base.y, s.v.local.angle, s.j, s.jp};
}

}  // namespace

GeodesicState GeodesicIntegrator::step(const GeodesicState& s, double h) const {
  Stepper stepper;
  State x = pack(s);
  auto sys = [this](const State& in, State& out, double) { rhs(in, out); };
  stepper.do_step(sys, x, 0.0, h);
  return finish(s, x, h);
}

GeodesicState GeodesicIntegrator::advance_fixed(GeodesicState s, double dt) const {
  if (dt < 0.0) throw DomainError("advance_fixed needs dt >= 0");
  const double h = config_.fixed_step;
  const double target = s.time + dt;
  const auto n = static_cast<long>(std::floor(dt / h));
  for (long i = 0; i < n; ++i) s = step(s, h);
  const double rest = target - s.time;
  if (rest > 0.0) s = step(s, rest);
  s.time = target;
  return s;
}

GeodesicState GeodesicIntegrator::advance(GeodesicState s, double dt) const {
  if (dt < 0.0) throw DomainError("advance needs dt >= 0");
  if (dt > config_.horizon) throw DomainError("integration time exceeds the configured horizon");
  auto ctrl = odeint::make_controlled<Stepper>(config_.abs_tol, config_.rel_tol);
  auto sys = [this](const State& in, State& out, double) { rhs(in, out); };
  double done = 0.0;
  double h = std::min(config_.max_step, dt);
  const double start = s.time;
  while (done < dt) {
    const bool last = h >= dt - done;
    if (last) h = dt - done;
    State x = pack(s);
    double t = 0.0;
    const double tried = h;
    if (ctrl.try_step(sys, x, t, h) == odeint::success) {
      s = finish(s, x, tried);
      done = last ? dt : done + tried;
      h = std::min(h, config_.max_step);
    } else if (h < 1e-14) {
      throw SolverFailure("step size underflow in geodesic integration at t = " + std::to_string(start + done),
                          start + done);
    }
  }
  s.time = start + dt;
  return s;
}

void GeodesicIntegrator::sample(GeodesicState s, const std::vector<double>& times,
                                const std::function<void(std::size_t, const GeodesicState&)>& visit) const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < s.time - 1e-15) throw DomainError("sample times must be nondecreasing");
    s = advance(s, std::max(0.0, times[i] - s.time));
    visit(i, s);
  }
}

}  // namespace focalfree
