#include "focalfree/metric.hpp"

#include <cmath>

namespace focalfree {

namespace {

// Small cache: enough for snapping relative decks of nearby lifted points.
WordCacheOptions local_cache_options() { return {6, 6.5}; }

}  // namespace

ConformalMetric::ConformalMetric() : group_(genus2_group(local_cache_options())) {}

ConformalMetric ConformalMetric::bump(double amplitude, DiskPoint center, double radius) {
  if (!(amplitude >= 0.0)) throw DomainError("bump amplitude must be >= 0");
  if (!(radius > 0.0)) throw DomainError("bump radius must be > 0");
  if (!center.valid()) throw DomainError("bump center outside the disk");
  const double reach = hyperbolic_distance(0.0, center.z()) + radius;
  if (reach >= FuchsianGroup::inradius())
    throw DomainError("bump support must lie inside the inscribed disk of the octagon (distance(center) + radius = " +
                      std::to_string(reach) + ")");
  ConformalMetric m;
  m.params_ = {amplitude, center, radius};
  const double t = std::tanh(radius / 2.0);
  m.sigma_max_ = t * t;
  // A nonzero bump has not been certified until someone checks it.
  m.certification_ = {amplitude == 0.0, std::nullopt, 0};
  return m;
}

ConformalMetric ConformalMetric::generic() const {
  ConformalMetric m = *this;
  m.force_generic_ = true;
  if (m.sigma_max_ == 0.0) {
    const double t = std::tanh(params_.radius / 2.0);
    m.sigma_max_ = t * t;
  }
  return m;
}

ConformalMetric ConformalMetric::with_certification(CertificationStatus status) const {
  ConformalMetric m = *this;
  m.certification_ = status;
  return m;
}

ConformalMetric::Jet ConformalMetric::local_jet(Complex z) const {
  Jet j;
  if (params_.amplitude == 0.0) return j;
  const Complex c = params_.center.z();
  const Complex den = 1.0 - std::conj(c) * z;
  const Complex w = (z - c) / den;
  const double sigma = std::norm(w);
  if (sigma >= sigma_max_) return j;

  // F(w) = A G(|w|^2), G(s) = exp(1 - 1/(1 - s/sigma_max))
  const double A = params_.amplitude;
  const double q = 1.0 / (1.0 - sigma / sigma_max_);
  const double G = std::exp(1.0 - q);
  const double G1 = -G * q * q / sigma_max_;
  const double G2 = G * (q * q * q * q - 2.0 * q * q * q) / (sigma_max_ * sigma_max_);

  j.u = A * G;
  // F_x + i F_y = 2 A G' w, pulled back through w(z) by conj(w'(z)).
  const Complex dw = (1.0 - std::norm(c)) / (den * den);
  const Complex grad = std::conj(dw) * (2.0 * A * G1 * w);
  j.ux = grad.real();
  j.uy = grad.imag();
  // The hyperbolic Laplacian is invariant under w(z).
  const double lap_w = A * (4.0 * G1 + 4.0 * sigma * G2);
  const double s = 1.0 - sigma;
  j.lap_hyp = 0.25 * s * s * lap_w;
  return j;
}

ConformalMetric::Jet ConformalMetric::jet(Complex z) const {
  if (params_.amplitude == 0.0) return {};
  if (group_->in_fundamental_domain(z)) return local_jet(z);
  const Reduction r = fd_reduce(*group_, DiskPoint::from(z));
  Jet j = local_jet(r.point.z());
  if (j.ux == 0.0 && j.uy == 0.0) return j;
  // u(z) = u(alpha z): the gradient picks up conj(alpha'(z)).
  const Complex den = std::conj(r.alpha.b()) * z + std::conj(r.alpha.a());
  const Complex dalpha = 1.0 / (den * den);
  const Complex grad = std::conj(dalpha) * Complex(j.ux, j.uy);
  j.ux = grad.real();
  j.uy = grad.imag();
  return j;
}

double ConformalMetric::conformal_factor(Complex z) const {
  return std::exp(u(z)) * 2.0 / (1.0 - std::norm(z));
}

double gauss_curvature(const ConformalMetric::Jet& j) { return std::exp(-2.0 * j.u) * (-1.0 - j.lap_hyp); }

double gauss_curvature(const ConformalMetric& metric, DiskPoint p) { return gauss_curvature(metric.jet(p.z())); }

}  // namespace focalfree
