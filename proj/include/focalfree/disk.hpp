#pragma once

// Unit-disk model of the hyperbolic plane: points, unit tangents, boundary
// points and orientation-preserving isometries in SU(1,1) form.

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace focalfree {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angle helpers. All boundary arithmetic goes through these.
double wrap_two_pi(double angle);            // -> [0, 2pi)
double wrap_pi(double angle);                // -> (-pi, pi]
double circular_distance(double a, double b);  // in [0, pi]

struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Root finders and boundary-value solvers throw this when they give up.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual(residual) {}
  double residual;
};

struct DiskPoint {
  double x = 0.0;
  double y = 0.0;

  Complex z() const { return {x, y}; }
  static DiskPoint from(Complex z) { return {z.real(), z.imag()}; }
  bool valid() const { return x * x + y * y < 1.0; }
};

struct UnitTangent {
  DiskPoint base;
  double angle = 0.0;  // model-coordinate direction, kept in [0, 2pi)

  UnitTangent reversed() const;
};

struct BoundaryPoint {
  double theta = 0.0;  // [0, 2pi)

  BoundaryPoint() = default;
  explicit BoundaryPoint(double t) : theta(wrap_two_pi(t)) {}
  Complex z() const { return std::polar(1.0, theta); }
};

// z -> (a z + b) / (conj(b) z + conj(a)),  |a|^2 - |b|^2 = 1.
class Mobius {
 public:
  Mobius() : a_(1.0, 0.0), b_(0.0, 0.0) {}
  Mobius(Complex a, Complex b) : a_(a), b_(b) {}

  static Mobius identity() { return {}; }
  static Mobius rotation(double phi);          // rotation about the origin by phi
  static Mobius translation(double distance);  // along the real axis, 0 -> tanh(d/2)
  static Mobius to_point(Complex z);           // 0 -> z, real positive derivative at 0
  static Mobius frame(const UnitTangent& v);   // (0, angle 0) -> v

  Complex a() const { return a_; }
  Complex b() const { return b_; }

  Complex operator()(Complex z) const { return (a_ * z + b_) / (std::conj(b_) * z + std::conj(a_)); }
  DiskPoint apply(const DiskPoint& p) const { return DiskPoint::from((*this)(p.z())); }
  UnitTangent apply(const UnitTangent& v) const;
  BoundaryPoint apply(const BoundaryPoint& xi) const;

  // arg of the complex derivative at z; tangent angles shift by this.
  double derivative_arg(Complex z) const;
  // |conj(b) z + conj(a)|^2, so that 1 - |M z|^2 = (1 - |z|^2) / denominator_norm(z).
  double denominator_norm(Complex z) const { return std::norm(std::conj(b_) * z + std::conj(a_)); }

  Mobius operator*(const Mobius& o) const {
    return {a_ * o.a_ + b_ * std::conj(o.b_), a_ * o.b_ + b_ * std::conj(o.a_)};
  }
  Mobius inverse() const { return {std::conj(a_), -b_}; }
  Mobius renormalized() const;

  double determinant() const { return std::norm(a_) - std::norm(b_); }
  Complex orbit_origin() const { return b_ / std::conj(a_); }  // M(0)
  double displacement() const;                                  // d(0, M(0))
  bool is_axial() const { return std::abs(a_.real()) > 1.0 + 1e-12; }
  double translation_length() const;
  // Attracting / repelling fixed points on the circle of an axial element.
  BoundaryPoint attracting_fixed_point() const;
  BoundaryPoint repelling_fixed_point() const;

  // Max entrywise deviation from other, modulo the sign ambiguity of PSU(1,1).
  double distance_to(const Mobius& other) const;

 private:
  Complex a_, b_;
};

// Closed-form hyperbolic geometry (curvature -1).
double hyperbolic_distance(Complex z, Complex w);
// d(z, m(w)) computed without forming 1 - |m(w)|^2 by subtraction.
double hyperbolic_distance(Complex z, const Mobius& m, Complex w);
// Direction (model angle) at z of the geodesic toward w; w may be on the circle.
double direction_to(Complex z, Complex w);
// Horofunction log(|zeta - z|^2 / (1 - |z|^2)); b_p(q, zeta) = B(q) - B(p).
double horofunction(Complex z, Complex zeta);

// Position of w in the frame of v: along-track and signed lateral hyperbolic offsets.
struct FrameOffset {
  double along = 0.0;
  double lateral = 0.0;
};
FrameOffset frame_offset(const UnitTangent& v, Complex w);
// Same for the image m(w), without forming 1 - |m(w)|^2 by subtraction.
FrameOffset frame_offset(const UnitTangent& v, const Mobius& m, Complex w);

}  // namespace focalfree
