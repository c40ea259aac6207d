#include "focalfree/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "focalfree/distance.hpp"
#include "focalfree/flow.hpp"

namespace focalfree {

namespace {

double orbit_distance(const ConformalMetric& metric, DiskPoint p, const Mobius& alpha, DiskPoint q,
                      const IntegratorConfig& config) {
  if (metric.closed_form()) return hyperbolic_distance(p.z(), alpha, q.z());
  return distance(metric, LiftedPoint{Mobius::identity(), p}, LiftedPoint{alpha, q}, {}, config);
}

double hyperbolic_norm(DiskPoint p) { return 2.0 * std::atanh(std::abs(p.z())); }

void check_cache(int L, double r, const char* what) {
  const WordCacheOptions& o = orbit_group().options();
  if (L > o.max_word_length) throw DomainError(std::string(what) + ": word length exceeds the orbit cache");
  if (r > o.max_radius + 1e-12) throw DomainError(std::string(what) + ": radius exceeds the orbit cache");
}

// Boundary point hit by the hyperbolic ray from p through m(q).
BoundaryPoint hyperbolic_direction(DiskPoint p, const Mobius& m, DiskPoint q) {
  const Mobius to_p = Mobius::to_point(p.z());
  const Complex w = (to_p.inverse() * m)(q.z());
  return to_p.apply(BoundaryPoint{std::arg(w)});
}

// Samples an index with probability proportional to weight (cumulative sums
// in `cdf`), using one uniform draw.
std::size_t draw_index(const std::vector<double>& cdf, Rng& rng) {
  const double x = rng.uniform() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  return std::min(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

int geodesic_rank(const ConformalMetric& metric, const Geodesic& g, double W) {
  if (metric.closed_form()) return 1;
  std::vector<double> trace;
  for (int i = 0; i <= 40; ++i) trace.push_back(gauss_curvature(metric, g.at(-W + W * i / 20.0).local.base));
  return rank_estimate(trace);
}

}  // namespace

const FuchsianGroup& orbit_group() {
  static const auto group = genus2_group({});
  return *group;
}

std::vector<OrbitPoint> orbit_distances(const ConformalMetric& metric, DiskPoint p, DiskPoint q, int L, double r_min,
                                        double r_max, const IntegratorConfig& config) {
  if (L < 0) throw DomainError("orbit_distances: L must be nonnegative");
  check_cache(L, r_max, "orbit_distances");
  std::vector<OrbitPoint> out;
  const auto& elements = orbit_group().elements();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const GroupElement& e = elements[i];
    if (e.length > L || e.displacement < r_min || e.displacement > r_max) continue;
    out.push_back({i, orbit_distance(metric, p, e.m, q, config)});
  }
  return out;
}

double poincare_series(const ConformalMetric& metric, double s, DiskPoint p, DiskPoint q, int L, double r_max,
                       const IntegratorConfig& config) {
  if (!(s > 0.0)) throw DomainError("poincare_series: s must be positive");
  if (r_max < 0.0) r_max = orbit_group().options().max_radius;
  double sum = 0.0;
  for (const OrbitPoint& o : orbit_distances(metric, p, q, L, 0.0, r_max, config)) sum += std::exp(-s * o.distance);
  return sum;
}

std::vector<double> poincare_partial_sums(const ConformalMetric& metric, double s, DiskPoint p, DiskPoint q, int L,
                                          const std::vector<double>& radii, const IntegratorConfig& config) {
  if (!(s > 0.0)) throw DomainError("poincare_partial_sums: s must be positive");
  if (radii.empty() || !std::is_sorted(radii.begin(), radii.end()))
    throw DomainError("poincare_partial_sums: radii must be nonempty and sorted");
  const auto& elements = orbit_group().elements();
  const auto orbit = orbit_distances(metric, p, q, L, 0.0, radii.back(), config);
  std::vector<double> sums(radii.size(), 0.0);
  for (const OrbitPoint& o : orbit) {
    const double d = elements[o.element].displacement;
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (d <= radii[k]) sums[k] += std::exp(-s * o.distance);
  }
  return sums;
}

EntropyEstimate critical_exponent(const ConformalMetric& metric, DiskPoint p, int L, const EntropyOptions& options,
                                  const IntegratorConfig& config) {
  if (L < 4) throw DomainError("critical_exponent: L must be at least 4");
  if (!(options.r_lo > 0.0) || !(options.r_hi > options.r_lo) || !(options.r_step > 0.0))
    throw DomainError("critical_exponent: bad fit window");
  // d >= e^{min u} d_hyp, so this hyperbolic radius holds every orbit point
  // within metric distance r_hi.
  const double stretch = std::exp(-std::min(0.0, metric.amplitude()));
  const double r_hyp = options.r_hi * stretch;
  check_cache(L, r_hyp + 2.0 * hyperbolic_norm(p), "critical_exponent");

  std::vector<double> dist;
  for (const GroupElement& e : orbit_group().elements()) {
    if (e.length > L) continue;
    if (hyperbolic_distance(p.z(), e.m, p.z()) > r_hyp) continue;
    const double d = orbit_distance(metric, p, e.m, p, config);
    if (d <= options.r_hi) dist.push_back(d);
  }
  std::sort(dist.begin(), dist.end());

  std::vector<double> xs, ys;
  for (double R = options.r_lo; R <= options.r_hi + 1e-12; R += options.r_step) {
    const auto n = std::upper_bound(dist.begin(), dist.end(), R) - dist.begin();
    if (n > 0) {
      xs.push_back(R);
      ys.push_back(std::log(static_cast<double>(n)));
    }
  }
  if (xs.size() < 3 || ys.back() - ys.front() <= 0.0)
    throw DomainError("critical_exponent: too few orbit points for the fit");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  EntropyEstimate est;
  est.h = sxy / sxx;
  est.points = static_cast<int>(xs.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + est.h * (xs[i] - mx));
    ss += r * r;
  }
  est.residual = std::sqrt(ss / n);
  return est;
}

double AtomicBoundaryMeasure::total() const {
  double t = 0.0;
  for (const auto& a : atoms) t += a.weight;
  return t;
}

std::vector<double> AtomicBoundaryMeasure::binned(int bins) const {
  if (bins < 1) throw DomainError("binned: need at least one bin");
  std::vector<double> out(bins, 0.0);
  for (const auto& a : atoms) {
    const int k = std::min(bins - 1, static_cast<int>(a.xi.theta / kTwoPi * bins));
    out[k] += a.weight;
  }
  return out;
}

AtomicBoundaryMeasure AtomicBoundaryMeasure::pushforward(const Mobius& m) const {
  AtomicBoundaryMeasure out = *this;
  for (auto& a : out.atoms) a.xi = m.apply(a.xi);
  out.base_point = m.apply(base_point);
  return out;
}

AtomicBoundaryMeasure ps_measure(const ConformalMetric& metric, DiskPoint p, int L, double s, double h,
                                 const PsOptions& options, const IntegratorConfig& config) {
  if (!(s > 0.0)) throw DomainError("ps_measure: s must be positive");
  if (!(options.width > 0.0) || !(options.r_out > options.width)) throw DomainError("ps_measure: bad shell");
  const double r_in = options.r_out - options.width;
  const auto& elements = orbit_group().elements();
  const auto from_p = orbit_distances(metric, p, options.q, L, r_in, options.r_out, config);
  const bool same = p.x == options.q.x && p.y == options.q.y;
  const auto from_q = same ? from_p : orbit_distances(metric, options.q, options.q, L, r_in, options.r_out, config);
  double norm = 0.0;
  for (const OrbitPoint& o : from_q) norm += std::exp(-s * o.distance);
  if (!(norm > 0.0)) throw DomainError("ps_measure: empty orbit shell");

  AtomicBoundaryMeasure mu;
  mu.base_point = p;
  mu.exponent = h;
  mu.L = L;
  mu.s = s;
  mu.atoms.reserve(from_p.size());
  for (const OrbitPoint& o : from_p)
    mu.atoms.push_back({hyperbolic_direction(p, elements[o.element].m, options.q), std::exp(-s * o.distance) / norm});
  return mu;
}

AtomicBoundaryMeasure ps_measure(const ConformalMetric& metric, DiskPoint p, int L, const PsOptions& options,
                                 const EntropyOptions& entropy, const IntegratorConfig& config) {
  const double h = critical_exponent(metric, options.q, L, entropy, config).h;
  return ps_measure(metric, p, L, h + options.s_offset, h, options, config);
}

double gromov_product(const ConformalMetric& metric, const LiftedPoint& p, const Geodesic& g, double t,
                      const BoundaryOptions& options, const IntegratorConfig& config) {
  const BoundaryPoint xi = g.endpoint(-1), eta = g.endpoint(1);
  const LiftedPoint q = g.at(t).point();
  if (metric.closed_form())
    return -(busemann(metric, p, q, xi, options, config) + busemann(metric, p, q, eta, options, config));
  const Ray to_xi = aim(metric, p, xi, options, config);
  const Ray to_eta = aim(metric, p, eta, options, config);
  const double b_xi = busemann_views(metric, view(to_xi), view(g.reversed(), -t), truncation_from(options, -t));
  const double b_eta = busemann_views(metric, view(to_eta), view(g, t), truncation_from(options, t));
  return -(b_xi + b_eta);
}

double gromov_product(const ConformalMetric& metric, DiskPoint p, BoundaryPoint xi, BoundaryPoint eta,
                      const BoundaryOptions& options, const IntegratorConfig& config) {
  if (!p.valid()) throw DomainError("gromov_product: p must lie in the open disk");
  const Geodesic g = connect(metric, xi, eta, options, config);
  return gromov_product(metric, LiftedPoint{Mobius::identity(), p}, g, 0.0, options, config);
}

BoundaryOptions SamplerOptions::loose_boundary() {
  BoundaryOptions o;
  o.busemann_T = 8.0;
  o.busemann_T_max = 10.0;
  o.busemann_tol = 1e-5;
  o.aim_tol = 1e-10;
  o.connect_tol = 1e-9;
  return o;
}

std::vector<MMESample> sample_mme(const ConformalMetric& metric, const AtomicBoundaryMeasure& mu, int n,
                                  std::uint64_t seed, const SamplerOptions& options, const IntegratorConfig& config) {
  if (n < 1) throw DomainError("sample_mme: n must be positive");
  if (mu.atoms.size() < 2) throw DomainError("sample_mme: measure needs at least two atoms");
  std::vector<double> cdf(mu.atoms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) cdf[i] = acc += mu.atoms[i].weight;

  const bool exact = metric.closed_form();
  const double margin = exact ? 0.0 : options.prefilter_margin;
  const double reach = FuchsianGroup::circumradius() + margin;
  // Arclength window around the anchor that holds every point of the octagon.
  const double window = exact ? FuchsianGroup::circumradius() : std::exp(std::max(0.0, metric.amplitude())) * reach;
  const LiftedPoint base{Mobius::identity(), mu.base_point};

  std::vector<MMESample> out;
  out.reserve(n);
  long attempts = 0, rejected = 0;
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (int tries = 0;; ++tries) {
      if (tries > 100000) throw SolverFailure("sample_mme: no acceptable pair", 1.0);
      ++attempts;
      const BoundaryPoint xi = mu.atoms[draw_index(cdf, rng)].xi;
      const BoundaryPoint eta = mu.atoms[draw_index(cdf, rng)].xi;
      const double t = rng.uniform(-window, window);
      // Hyperbolic closest approach to the origin: cosh rho = 1 / sin(gap / 2).
      const double gap = circular_distance(xi.theta, eta.theta);
      if (gap < 1e-9 || std::acosh(1.0 / std::sin(0.5 * gap)) > reach) {
        ++rejected;
        continue;
      }
      const Geodesic g = connect(metric, xi, eta, options.boundary, config);
      const LiftedTangent v = g.at(t);
      if (v.deck.displacement() > 1e-9 || geodesic_rank(metric, g, window) != 1) {
        ++rejected;
        continue;
      }
      const double beta = gromov_product(metric, base, g, 0.0, options.boundary, config);
      out.push_back({v.local, {xi, eta, std::exp(mu.exponent * beta)}, t});
      break;
    }
  }
  if (static_cast<double>(rejected) > options.max_rejection * static_cast<double>(attempts))
    throw SolverFailure("sample_mme: rejection rate too high", static_cast<double>(rejected) / attempts);
  return out;
}

std::vector<MMESample> sample_liouville(const ConformalMetric& metric, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_liouville: n must be positive");
  std::vector<MMESample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const UnitTangent v = uniform_fd_tangent(metric.group(), rng);
    out.push_back({v, {BoundaryPoint{}, BoundaryPoint{}, std::exp(2.0 * metric.u(v.base.z()))}, 0.0});
  }
  return out;
}

}  // namespace focalfree
