#include "focalfree/disk.hpp"

#include <algorithm>
#include <cmath>

namespace focalfree {

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // fmod of tiny negatives rounds up to 2pi
  return r;
}

double wrap_pi(double angle) {
  double r = wrap_two_pi(angle);
  return r > kPi ? r - kTwoPi : r;
}

double circular_distance(double a, double b) { return std::abs(wrap_pi(a - b)); }

UnitTangent UnitTangent::reversed() const { return {base, wrap_two_pi(angle + kPi)}; }

Mobius Mobius::rotation(double phi) { return {std::polar(1.0, phi / 2.0), 0.0}; }

Mobius Mobius::translation(double distance) {
  return {std::cosh(distance / 2.0), std::sinh(distance / 2.0)};
}

Mobius Mobius::to_point(Complex z) {
  const double s = 1.0 / std::sqrt(1.0 - std::norm(z));
  return {s, z * s};
}

Mobius Mobius::frame(const UnitTangent& v) { return to_point(v.base.z()) * rotation(v.angle); }

UnitTangent Mobius::apply(const UnitTangent& v) const {
  const Complex z = v.base.z();
  return {DiskPoint::from((*this)(z)), wrap_two_pi(v.angle + derivative_arg(z))};
}

BoundaryPoint Mobius::apply(const BoundaryPoint& xi) const {
  return BoundaryPoint(std::arg((*this)(xi.z())));
}

double Mobius::derivative_arg(Complex z) const {
  return -2.0 * std::arg(std::conj(b_) * z + std::conj(a_));
}

Mobius Mobius::renormalized() const {
  const double s = 1.0 / std::sqrt(determinant());
  return {a_ * s, b_ * s};
}

double Mobius::displacement() const { return 2.0 * std::asinh(std::abs(b_)); }

double Mobius::translation_length() const {
  const double t = std::abs(a_.real());
  return t > 1.0 ? 2.0 * std::acosh(t) : 0.0;
}

namespace {

// Fixed points (i Im a +- sqrt(Re(a)^2 - 1)) / conj(b) of an axial element.
std::pair<Complex, Complex> axial_fixed_points(Complex a, Complex b) {
  if (std::abs(a.real()) <= 1.0) throw DomainError("Mobius element is not axial");
  const double root = std::sqrt(a.real() * a.real() - 1.0);
  const Complex num(0.0, a.imag());
  return {(num + root) / std::conj(b), (num - root) / std::conj(b)};
}

}  // namespace

BoundaryPoint Mobius::attracting_fixed_point() const {
  auto [z1, z2] = axial_fixed_points(a_, b_);
  // |M'(z)| = 1 / |conj(b) z + conj(a)|^2; attracting means |M'| < 1.
  return BoundaryPoint(std::arg(denominator_norm(z1) > denominator_norm(z2) ? z1 : z2));
}

BoundaryPoint Mobius::repelling_fixed_point() const {
  auto [z1, z2] = axial_fixed_points(a_, b_);
  return BoundaryPoint(std::arg(denominator_norm(z1) > denominator_norm(z2) ? z2 : z1));
}

double Mobius::distance_to(const Mobius& o) const {
  const double plus = std::max(std::abs(a_ - o.a_), std::abs(b_ - o.b_));
  const double minus = std::max(std::abs(a_ + o.a_), std::abs(b_ + o.b_));
  return std::min(plus, minus);
}

double hyperbolic_distance(Complex z, Complex w) {
  const double den = std::sqrt((1.0 - std::norm(z)) * (1.0 - std::norm(w)));
  return 2.0 * std::asinh(std::abs(z - w) / den);
}

double hyperbolic_distance(Complex z, const Mobius& m, Complex w) {
  const Complex mw = m(w);
  const double one_minus = (1.0 - std::norm(w)) / m.denominator_norm(w);
  const double den = std::sqrt((1.0 - std::norm(z)) * one_minus);
  return 2.0 * std::asinh(std::abs(z - mw) / den);
}

double direction_to(Complex z, Complex w) {
  return wrap_two_pi(std::arg((w - z) / (1.0 - std::conj(z) * w)));
}

double horofunction(Complex z, Complex zeta) {
  return std::log(std::norm(zeta - z)) - std::log(1.0 - std::norm(z));
}

FrameOffset frame_offset(const UnitTangent& v, Complex w) {
  return frame_offset(v, Mobius::identity(), w);
}

FrameOffset frame_offset(const UnitTangent& v, const Mobius& m, Complex w) {
  const Mobius to_frame = Mobius::frame(v).inverse() * m;
  const Complex u = to_frame(w);
  // Foot of the perpendicular: tanh(along) = 2 Re u / (1 + |u|^2), written in
  // a form that stays finite for u near the circle.
  const double along = std::log(std::abs(1.0 + u) / std::abs(1.0 - u));
  const double one_minus = (1.0 - std::norm(w)) / to_frame.denominator_norm(w);
  return {along, std::asinh(2.0 * u.imag() / one_minus)};
}

}  // namespace focalfree
