#pragma once

// Boundary at infinity: endpoints, Busemann functions, connecting geodesics,
// horospheres, stable and unstable lifts, cones, and orbit dynamics on the
// circle.
//
// Numerical geodesics are kept as recorded fixed-step trajectories (Ray,
// Geodesic). Two rays that share an endpoint are compared along those
// recorded trajectories, so the exponential sensitivity of the flow never
// enters a Busemann value or a lift.

#include <functional>
#include <memory>
#include <vector>

#include "focalfree/group.hpp"
#include "focalfree/integrator.hpp"
#include "focalfree/lifted.hpp"
#include "focalfree/metric.hpp"

namespace focalfree {

struct BoundaryOptions {
  double busemann_T = 10.0;      // truncation time; the value is compared with 2T
  double busemann_T_max = 12.0;  // T is raised in steps of 2 up to here if needed
  double busemann_tol = 1e-6;
  double endpoint_cutoff = 0.9999;
  double aim_tol = 1e-13;        // boundary angle
  double connect_tol = 1e-12;
  double lift_window = 50.0;     // |s| bound for the stable-lift root
  // Recorded rays reach ray_margin past the longest Busemann truncation.
  double ray_margin = 4.0;

  double ray_horizon() const;
  void validate() const;
};

// Forward trajectory from a start vector, recorded at every fixed step.
// at(t) interpolates by a partial step from the nearest recorded state below t,
// so it is smooth in t and consistent with the recorded states.
class Ray {
 public:
  Ray() = default;
  Ray(const ConformalMetric& metric, const LiftedTangent& start, double horizon, const IntegratorConfig& config = {});

  LiftedTangent at(double t) const;
  const LiftedTangent& start() const { return start_; }
  double horizon() const { return horizon_; }
  // Endpoint of the hyperbolic geodesic osculating the ray at its horizon.
  BoundaryPoint endpoint() const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;  // shared so that copies are cheap
  LiftedTangent start_;
  double horizon_ = 0.0;
  double step_ = 0.0;
  bool closed_form_ = false;
};

// Bi-infinite geodesic, truncated at +-horizon, parametrized so that
// at(0) is the anchor.
class Geodesic {
 public:
  Geodesic() = default;
  Geodesic(const ConformalMetric& metric, const LiftedTangent& anchor, double horizon,
           const IntegratorConfig& config = {});

  LiftedTangent at(double t) const;
  LiftedTangent anchor() const { return at(0.0); }
  BoundaryPoint endpoint(int sign) const { return sign > 0 ? forward_.endpoint() : backward_.endpoint(); }
  double horizon(int sign) const { return sign > 0 ? forward_.horizon() - shift_ : backward_.horizon() + shift_; }
  // The same curve run backwards: reversed().at(t) = at(-t).reversed().
  Geodesic reversed() const;
  // Same curve with the anchor moved to at(s).
  Geodesic shifted(double s) const;

 private:
  Ray forward_, backward_;
  double shift_ = 0.0;
};

// Truncation for views that start at parameter `start` of a geodesic anchored
// near the origin: start + 2T keeps its nominal value, so the views never go
// further out than usual, where nominally asymptotic geodesics separate.
BoundaryOptions truncation_from(const BoundaryOptions& options, double start);

// A geodesic seen from parameter s on: t -> g.at(s + t).
using RayView = std::function<LiftedTangent(double)>;
RayView view(const Geodesic& g, double s = 0.0);
RayView view(const Ray& r);

BoundaryPoint endpoint(const ConformalMetric& metric, const LiftedTangent& v, int sign,
                       const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
BoundaryPoint endpoint(const ConformalMetric& metric, const UnitTangent& v, int sign,
                       const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

// Ray from p whose endpoint is xi.
Ray aim(const ConformalMetric& metric, const LiftedPoint& p, BoundaryPoint xi, const BoundaryOptions& options = {},
        const IntegratorConfig& config = {});

// Limit of s_B(T) - T where B(s_B(T)) is abeam of A(T), for forward-asymptotic
// views A and B. With A the ray from p and B the ray from q toward the same
// point this is b_p(q, xi).
double asymptotic_offset(const ConformalMetric& metric, const RayView& a, const RayView& b, double T);

// b_p(q, xi) = lim d(q, gamma_{p,xi}(t)) - t.
double busemann(const ConformalMetric& metric, const LiftedPoint& p, const LiftedPoint& q, BoundaryPoint xi,
                const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
double busemann(const ConformalMetric& metric, DiskPoint p, DiskPoint q, BoundaryPoint xi,
                const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
// Same, with the ray from p replaced by a given view that ends at xi.
double busemann_along(const ConformalMetric& metric, const RayView& from_p, const LiftedPoint& q, BoundaryPoint xi,
                      const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

// b_p(q, xi) from a ray out of p and a ray out of q that end at the same
// point; truncated at T and checked against 2T.
double busemann_views(const ConformalMetric& metric, const RayView& from_p, const RayView& from_q,
                      const BoundaryOptions& options = {});

// Parameter of the point of g abeam of x (hyperbolic frame), and the lateral
// offset left over.
struct Projection {
  double t = 0.0;
  double lateral = 0.0;
};
Projection project(const ConformalMetric& metric, const Geodesic& g, const LiftedPoint& x);

// Geodesic from xi to eta anchored at its closest approach to the origin
// (hyperbolic proxy for the numeric case).
Geodesic connect(const ConformalMetric& metric, BoundaryPoint xi, BoundaryPoint eta, const BoundaryOptions& options = {},
                 const IntegratorConfig& config = {});
// Geodesic through a given vector.
Geodesic geodesic_through(const ConformalMetric& metric, const LiftedTangent& v, const BoundaryOptions& options = {},
                          const IntegratorConfig& config = {});

// Parameter s* on target with b_{v}(target(s*), xi) = 0, where xi is the
// shared forward endpoint and v is given by a view starting at it.
double stable_lift_parameter(const ConformalMetric& metric, const RayView& v, const Geodesic& target,
                             const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
double unstable_lift_parameter(const ConformalMetric& metric, const Geodesic& source, double s,
                               const Geodesic& target, const BoundaryOptions& options = {},
                               const IntegratorConfig& config = {});

LiftedTangent stable_lift(const ConformalMetric& metric, const LiftedTangent& v, const Geodesic& target,
                          const BoundaryOptions& options = {}, const IntegratorConfig& config = {});
LiftedTangent unstable_lift(const ConformalMetric& metric, const LiftedTangent& v, const Geodesic& target,
                            const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

// Sampled test of d(g1(t), g2(t)) <= C on [0, T] (sign > 0) or [-T, 0].
bool asymptotic_check(const ConformalMetric& metric, const Geodesic& g1, const Geodesic& g2, int sign, double T,
                      double C, int samples = 41, const IntegratorConfig& config = {});

struct TruncatedCone {
  LiftedTangent axis;
  double epsilon = 0.5;
  double r = 1.0;
};

bool cone_contains(const ConformalMetric& metric, const TruncatedCone& tc, const LiftedPoint& x,
                   const IntegratorConfig& config = {});
bool cone_contains(const ConformalMetric& metric, const TruncatedCone& tc, BoundaryPoint xi,
                   const BoundaryOptions& options = {}, const IntegratorConfig& config = {});

struct Horosphere {
  BoundaryPoint center;
  LiftedPoint anchor;
};

// n points of the horosphere through anchor, on geodesics toward center
// launched from points spread across a hyperbolic distance `spread`.
std::vector<LiftedTangent> horosphere_points(const ConformalMetric& metric, const Horosphere& h, int n,
                                             double spread = 1.0, const BoundaryOptions& options = {},
                                             const IntegratorConfig& config = {});

// Largest circular gap of {alpha xi : alpha cached, word length <= L}.
double minimality_gap(const FuchsianGroup& group, BoundaryPoint xi, int L);

struct Arc {
  BoundaryPoint center;
  double half_width = 0.25;
  bool contains(BoundaryPoint p) const;
};

// True iff alpha^n maps sampled points outside U into V for all n in [N, N+10].
bool north_south_check(const Mobius& alpha, const Arc& U, const Arc& V, int N, int samples = 256);
// Smallest N (up to max_n) for which north_south_check holds, or -1.
int north_south_threshold(const Mobius& alpha, const Arc& U, const Arc& V, int max_n = 100, int samples = 256);

}  // namespace focalfree
