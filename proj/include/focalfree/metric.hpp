#pragma once

// Gamma-equivariant conformal perturbations of the hyperbolic metric:
//   ds = e^{u(z)} * 2|dz| / (1 - |z|^2)
// with u a smooth compactly supported radial bump placed inside the
// fundamental octagon and extended to the disk by the group action.

#include <memory>
#include <optional>

#include "focalfree/disk.hpp"
#include "focalfree/group.hpp"

namespace focalfree {

struct BumpParams {
  double amplitude = 0.0;
  DiskPoint center{};
  double radius = 1.0;  // hyperbolic radius of the support
};

struct CertificationStatus {
  bool certified = false;
  std::optional<double> witness_time;  // first focal violation found, if any
  int vectors_checked = 0;
};

class ConformalMetric {
 public:
  ConformalMetric();

  static ConformalMetric hyperbolic() { return {}; }
  // Support must sit inside the inscribed disk of the octagon.
  static ConformalMetric bump(double amplitude, DiskPoint center, double radius);

  const BumpParams& params() const { return params_; }
  double amplitude() const { return params_.amplitude; }

  // Closed-form hyperbolic shortcuts are used iff this is true.
  bool closed_form() const { return params_.amplitude == 0.0 && !force_generic_; }
  // The same metric with closed forms disabled (exercises the ODE paths).
  ConformalMetric generic() const;

  struct Jet {
    double u = 0.0;
    double ux = 0.0;  // Euclidean partials in model coordinates
    double uy = 0.0;
    double lap_hyp = 0.0;  // hyperbolic Laplacian
  };
  Jet jet(Complex z) const;
  double u(Complex z) const { return jet(z).u; }
  // e^u * 2 / (1 - |z|^2): metric length of a unit model vector at z.
  double conformal_factor(Complex z) const;

  // Sampled no-focal-points certification, recorded on the metric value.
  const CertificationStatus& certification() const { return certification_; }
  bool certified_no_focal() const { return certification_.certified; }
  ConformalMetric with_certification(CertificationStatus status) const;

  // Small word cache used for reductions and deck snapping.
  const FuchsianGroup& group() const { return *group_; }
  const std::shared_ptr<const FuchsianGroup>& group_ptr() const { return group_; }

 private:
  Jet local_jet(Complex z) const;

  BumpParams params_;
  bool force_generic_ = false;
  double sigma_max_ = 0.0;  // tanh^2(radius / 2)
  CertificationStatus certification_{true, std::nullopt, 0};
  std::shared_ptr<const FuchsianGroup> group_;
};

// K = e^{-2u} (-1 - lap_hyp u)
double gauss_curvature(const ConformalMetric::Jet& jet);
double gauss_curvature(const ConformalMetric& metric, DiskPoint p);

}  // namespace focalfree
