#include "focalfree/ergodic.hpp"

#include <cmath>

#include "focalfree/flow.hpp"

namespace focalfree {

namespace {

// (1 - r^2)^2 on r < 1: C^1 at the rim.
double rim_bump(double r) { return r < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0; }

double hyperbolic_norm(const DiskPoint& p) { return 2.0 * std::atanh(std::abs(p.z())); }

void check_batches(std::size_t n, int batches) {
  if (batches < 2) throw DomainError("need at least two batches");
  if (n < static_cast<std::size_t>(batches)) throw DomainError("fewer samples than batches");
}

struct Moments {
  double w = 0.0, f = 0.0, g = 0.0, fg = 0.0, ff = 0.0;
  void add(double weight, double a, double b) {
    w += weight;
    f += weight * a;
    g += weight * b;
    fg += weight * a * b;
    ff += weight * a * a;
  }
  double covariance() const { return fg / w - (f / w) * (g / w); }
  double mean() const { return f / w; }
};

double standard_error(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0) / n);
}

// Batch b covers samples [b n / B, (b + 1) n / B).
std::size_t batch_begin(std::size_t n, int batches, int b) { return n * b / batches; }

std::vector<double> flowed_values(const ConformalMetric& metric, const Observable& g, double t,
                                  const std::vector<MMESample>& samples, const IntegratorConfig& config) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(g(flow(metric, lift(metric, s.tangent), t, config)));
  return out;
}

CorrelationEstimate covariance_estimate(const std::vector<MMESample>& samples, const std::vector<double>& fv,
                                        const std::vector<double>& gv, int batches) {
  const std::size_t n = samples.size();
  Moments all;
  std::vector<double> per_batch;
  for (int b = 0; b < batches; ++b) {
    Moments m;
    for (std::size_t i = batch_begin(n, batches, b); i < batch_begin(n, batches, b + 1); ++i) {
      m.add(samples[i].source.weight, fv[i], gv[i]);
      all.add(samples[i].source.weight, fv[i], gv[i]);
    }
    per_batch.push_back(m.covariance());
  }
  return {all.covariance(), standard_error(per_batch)};
}

}  // namespace

double Observable::operator()(const FuchsianGroup& group, const UnitTangent& v) const {
  if (group.in_fundamental_domain(v.base.z())) return rule(v);
  const Reduction r = fd_reduce(group, v.base);
  return rule(r.alpha.apply(v));
}

Observable constant_observable(double c) {
  return {"constant", [c](const UnitTangent&) { return c; }, "constant"};
}

Observable angular_harmonic() {
  const double r0 = FuchsianGroup::inradius();
  return {"angular_harmonic",
          [r0](const UnitTangent& v) { return std::cos(v.angle) * rim_bump(hyperbolic_norm(v.base) / r0); },
          "C^1, supported in the inscribed disk"};
}

Observable disk_indicator(double radius, double ramp) {
  if (!(radius > 0.0) || !(ramp > 0.0) || radius + ramp > FuchsianGroup::inradius())
    throw DomainError("disk_indicator: disk must sit inside the inscribed disk");
  return {"disk_indicator",
          [radius, ramp](const UnitTangent& v) {
            const double x = (hyperbolic_norm(v.base) - radius) / ramp;
            if (x <= 0.0) return 1.0;
            if (x >= 1.0) return 0.0;
            return 1.0 - x * x * (3.0 - 2.0 * x);  // smoothstep
          },
          "C^1, supported in the inscribed disk"};
}

CorrelationEstimate correlation(const ConformalMetric& metric, const Observable& f, const Observable& g, double t,
                                const std::vector<MMESample>& samples, const CorrelationOptions& options) {
  return mixing_curve(metric, f, g, {t}, samples, 0, options).estimates.front();
}

CorrelationEstimate correlation(const ConformalMetric& metric, const Observable& f, const Observable& g, double t,
                                const AtomicBoundaryMeasure& mu, int N, std::uint64_t seed,
                                const CorrelationOptions& options, const SamplerOptions& sampler) {
  return mixing_curve(metric, f, g, {t}, mu, N, seed, options, sampler).estimates.front();
}

CorrelationSeries mixing_curve(const ConformalMetric& metric, const Observable& f, const Observable& g,
                               const std::vector<double>& t_grid, const std::vector<MMESample>& samples,
                               std::uint64_t seed, const CorrelationOptions& options) {
  if (samples.size() < 100) throw DomainError("correlation: need at least 100 samples");
  check_batches(samples.size(), options.batches);
  if (t_grid.empty()) throw DomainError("mixing_curve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("mixing_curve: time grid must be strictly increasing");

  std::vector<double> fv;
  fv.reserve(samples.size());
  for (const auto& s : samples) fv.push_back(f(metric.group(), s.tangent));
  CorrelationSeries series;
  series.t_grid = t_grid;
  series.N = static_cast<int>(samples.size());
  series.seed = seed;
  for (double t : t_grid) {
    const auto gv = flowed_values(metric, g, t, samples, options.integrator);
    series.estimates.push_back(covariance_estimate(samples, fv, gv, options.batches));
  }
  return series;
}

CorrelationSeries mixing_curve(const ConformalMetric& metric, const Observable& f, const Observable& g,
                               const std::vector<double>& t_grid, const AtomicBoundaryMeasure& mu, int N,
                               std::uint64_t seed, const CorrelationOptions& options, const SamplerOptions& sampler) {
  if (N < 100) throw DomainError("correlation: N must be at least 100");
  const auto samples = sample_mme(metric, mu, N, seed, sampler, options.integrator);
  return mixing_curve(metric, f, g, t_grid, samples, seed, options);
}

CorrelationEstimate space_average(const ConformalMetric& metric, const Observable& f,
                                  const std::vector<MMESample>& samples, int batches) {
  check_batches(samples.size(), batches);
  const std::size_t n = samples.size();
  Moments all;
  std::vector<double> per_batch;
  for (int b = 0; b < batches; ++b) {
    Moments m;
    for (std::size_t i = batch_begin(n, batches, b); i < batch_begin(n, batches, b + 1); ++i) {
      const double v = f(metric.group(), samples[i].tangent);
      m.add(samples[i].source.weight, v, 0.0);
      all.add(samples[i].source.weight, v, 0.0);
    }
    per_batch.push_back(m.mean());
  }
  return {all.mean(), standard_error(per_batch)};
}

BirkhoffResult birkhoff_average(const ConformalMetric& metric, const Observable& f, const UnitTangent& v, double T,
                                const BirkhoffOptions& options) {
  if (!(T > 0.0)) throw DomainError("birkhoff_average: T must be positive");
  if (!(options.dt > 0.0)) throw DomainError("birkhoff_average: dt must be positive");
  if (options.batches < 2) throw DomainError("birkhoff_average: need at least two batches");
  // Steps per batch even, so each batch is a whole Simpson panel sequence.
  const int per_batch = 2 * std::max(1, static_cast<int>(std::ceil(T / options.dt / (2.0 * options.batches))));
  const int n = per_batch * options.batches;
  const double h = T / n;

  LiftedTangent cur = lift(metric, v);
  std::vector<double> values(n + 1);
  values[0] = f(cur);
  for (int k = 1; k <= n; ++k) {
    cur = flow(metric, LiftedTangent{Mobius::identity(), cur.local}, h, options.integrator);
    values[k] = f(cur);
  }
  auto simpson = [&](int a, int b) {
    double s = values[a] + values[b];
    for (int k = a + 1; k < b; ++k) s += (k - a) % 2 ? 4.0 * values[k] : 2.0 * values[k];
    return s * h / 3.0;
  };
  BirkhoffResult r;
  r.T = T;
  std::vector<double> block;
  double total = 0.0;
  for (int b = 0; b < options.batches; ++b) {
    const double integral = simpson(b * per_batch, (b + 1) * per_batch);
    total += integral;
    block.push_back(integral / (per_batch * h));
  }
  r.average = total / T;
  r.stderr_ = standard_error(block);
  return r;
}

std::vector<double> stable_contraction_test(const ConformalMetric& metric, const LiftedTangent& v,
                                            const LiftedTangent& w, const std::vector<double>& t_grid,
                                            const IntegratorConfig& config) {
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) out.push_back(knieper_d1(metric, flow(metric, v, t, config), flow(metric, w, t, config), config));
  return out;
}

}  // namespace focalfree
