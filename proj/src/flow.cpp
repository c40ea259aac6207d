#include "focalfree/flow.hpp"

#include <algorithm>
#include <cmath>

#include "focalfree/distance.hpp"
#include "focalfree/rng.hpp"

namespace focalfree {

namespace {

LiftedTangent hyperbolic_flow(const FuchsianGroup& group, LiftedTangent v, double t) {
  // Chunks of length <= 1 keep the local frame well conditioned.
  double remaining = t;
  while (remaining != 0.0) {
    const double dt = std::clamp(remaining, -1.0, 1.0);
    const Mobius f = Mobius::frame(v.local) * Mobius::translation(dt);
    v = normalize(group, LiftedTangent{v.deck, UnitTangent{DiskPoint::from(f.orbit_origin()),
                                                           wrap_two_pi(f.derivative_arg(0.0))}});
    remaining -= dt;
    if (std::abs(remaining) < 1e-15) remaining = 0.0;
  }
  return v;
}

}  // namespace

LiftedTangent flow(const ConformalMetric& metric, const LiftedTangent& v, double t, const IntegratorConfig& config) {
  const LiftedTangent start = normalize(metric.group(), v);
  if (metric.closed_form()) return hyperbolic_flow(metric.group(), start, t);
  GeodesicIntegrator integ(metric, config);
  if (t >= 0.0) return integ.advance({start, 0.0, 0.0, 0.0}, t).v;
  return integ.advance({start.reversed(), 0.0, 0.0, 0.0}, -t).v.reversed();
}

UnitTangent flow(const ConformalMetric& metric, const UnitTangent& v, double t, const IntegratorConfig& config) {
  return flow(metric, LiftedTangent{Mobius::identity(), v}, t, config).resolve();
}

JacobiState jacobi_evolve(const ConformalMetric& metric, const LiftedTangent& v, JacobiState j0, double t,
                          const IntegratorConfig& config) {
  if (t < 0.0) throw DomainError("jacobi_evolve needs t >= 0");
  if (metric.closed_form()) {
    const double c = std::cosh(t), s = std::sinh(t);
    return {j0.j * c + j0.jp * s, j0.j * s + j0.jp * c};
  }
  GeodesicIntegrator integ(metric, config);
  const GeodesicState end = integ.advance({normalize(metric.group(), v), j0.j, j0.jp, 0.0}, t);
  return {end.j, end.jp};
}

JacobiState jacobi_evolve(const ConformalMetric& metric, const UnitTangent& v, JacobiState j0, double t,
                          const IntegratorConfig& config) {
  return jacobi_evolve(metric, LiftedTangent{Mobius::identity(), v}, j0, t, config);
}

FocalCheck no_focal_check(const ConformalMetric& metric, const LiftedTangent& v, double T, int n_samples,
                          const IntegratorConfig& config) {
  if (!(T > 0.0) || n_samples < 1) throw DomainError("no_focal_check needs T > 0 and n_samples >= 1");
  std::vector<double> times(n_samples);
  for (int i = 0; i < n_samples; ++i) times[i] = T * (i + 1) / n_samples;
  FocalCheck result;
  if (metric.closed_form()) {
    for (double t : times)
      if (!(std::sinh(t) * std::cosh(t) > 0.0)) return {false, t};
    return result;
  }
  GeodesicIntegrator integ(metric, config);
  integ.sample({normalize(metric.group(), v), 0.0, 1.0, 0.0}, times, [&](std::size_t i, const GeodesicState& s) {
    if (result.pass && !(s.j * s.jp > 0.0)) {
      result.pass = false;
      result.witness_time = times[i];
    }
  });
  return result;
}

FocalCheck no_focal_check(const ConformalMetric& metric, const UnitTangent& v, double T, int n_samples,
                          const IntegratorConfig& config) {
  return no_focal_check(metric, LiftedTangent{Mobius::identity(), v}, T, n_samples, config);
}

CertificationStatus certify_no_focal(const ConformalMetric& metric, const CertificationOptions& options,
                                     const IntegratorConfig& config) {
  std::vector<UnitTangent> vectors;
  if (metric.amplitude() > 0.0) {
    // Probes: through the bump center and across it at half radius, where a
    // positive-curvature cap focuses most strongly.
    const auto& bp = metric.params();
    const Mobius to_center = Mobius::to_point(bp.center.z());
    for (int k = 0; k < 16; ++k) vectors.push_back(to_center.apply(UnitTangent{{0.0, 0.0}, k * kPi / 8.0}));
    const double r = std::tanh(bp.radius / 4.0);
    for (int k = 0; k < 8; ++k) {
      const double phi = k * kPi / 4.0;
      const UnitTangent start{DiskPoint::from(std::polar(r, phi + kPi)), phi};
      vectors.push_back(to_center.apply(start));
      vectors.push_back(to_center.apply(UnitTangent{start.base, phi + kPi / 2.0}));
    }
  }
  Rng rng(derive_seed(options.seed, 0x6e6f666f63616cULL));
  for (int i = 0; i < options.n_vectors; ++i) vectors.push_back(uniform_fd_tangent(metric.group(), rng));

  CertificationStatus status{true, std::nullopt, 0};
  for (const auto& v : vectors) {
    ++status.vectors_checked;
    const FocalCheck check = no_focal_check(metric, v, options.T, options.n_samples, config);
    if (!check.pass) {
      status.certified = false;
      status.witness_time = check.witness_time;
      break;
    }
  }
  return status;
}

ConformalMetric certified(const ConformalMetric& metric, const CertificationOptions& options,
                          const IntegratorConfig& config) {
  return metric.with_certification(certify_no_focal(metric, options, config));
}

std::vector<double> curvature_trace(const ConformalMetric& metric, const LiftedTangent& v, double t0, double t1,
                                    int n, const IntegratorConfig& config) {
  if (n < 1 || !(t1 >= t0)) throw DomainError("curvature_trace needs n >= 1 and t1 >= t0");
  std::vector<double> out;
  out.reserve(n);
  if (metric.closed_form()) return std::vector<double>(n, -1.0);
  GeodesicIntegrator integ(metric, config);
  const LiftedTangent start = flow(metric, v, t0, config);
  std::vector<double> times(n);
  for (int i = 0; i < n; ++i) times[i] = n == 1 ? 0.0 : (t1 - t0) * i / (n - 1);
  integ.sample({start, 0.0, 0.0, 0.0}, times, [&](std::size_t, const GeodesicState& s) {
    out.push_back(gauss_curvature(metric, s.v.local.base));
  });
  return out;
}

int rank_estimate(std::span<const double> trace, double tol) {
  if (trace.empty()) throw DomainError("rank_estimate needs a nonempty trace");
  for (double k : trace)
    if (!(std::abs(k) < tol)) return 1;
  return 2;
}

double knieper_d1(const ConformalMetric& metric, const LiftedTangent& v, const LiftedTangent& w,
                  const IntegratorConfig& config) {
  constexpr int kGrid = 65;
  auto dist_at = [&](const LiftedTangent& a, const LiftedTangent& b) {
    return distance(metric, a.point(), b.point(), {}, config);
  };
  std::vector<double> times(kGrid);
  for (int i = 0; i < kGrid; ++i) times[i] = static_cast<double>(i) / (kGrid - 1);
  std::vector<double> values(kGrid);
  if (metric.closed_form()) {
    for (int i = 0; i < kGrid; ++i) values[i] = dist_at(flow(metric, v, times[i]), flow(metric, w, times[i]));
  } else {
    GeodesicIntegrator integ(metric, config);
    std::vector<LiftedTangent> gv(kGrid), gw(kGrid);
    integ.sample({normalize(metric.group(), v), 0, 0, 0}, times,
                 [&](std::size_t i, const GeodesicState& s) { gv[i] = s.v; });
    integ.sample({normalize(metric.group(), w), 0, 0, 0}, times,
                 [&](std::size_t i, const GeodesicState& s) { gw[i] = s.v; });
    for (int i = 0; i < kGrid; ++i) values[i] = dist_at(gv[i], gw[i]);
  }
  const auto it = std::max_element(values.begin(), values.end());
  const int k = static_cast<int>(it - values.begin());
  double best = *it;
  double a = times[std::max(0, k - 1)], b = times[std::min(kGrid - 1, k + 1)];
  auto f = [&](double t) { return dist_at(flow(metric, v, t, config), flow(metric, w, t, config)); };
  // Golden-section search for the maximum on [a, b].
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int iter = 0; iter < 40 && b - a > 1e-9; ++iter) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max({best, fc, fd});
}

}  // namespace focalfree
