#include "focalfree/rng.hpp"

#include <cmath>

namespace focalfree {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream));
}

namespace {

DiskPoint uniform_in_ball(Rng& rng, double radius) {
  // Hyperbolic area inside radius r is 2 pi (cosh r - 1).
  const double r = std::acosh(1.0 + rng.uniform() * (std::cosh(radius) - 1.0));
  const double phi = rng.uniform(0.0, kTwoPi);
  return DiskPoint::from(std::polar(std::tanh(r / 2.0), phi));
}

}  // namespace

DiskPoint uniform_fd_point(Rng& rng) {
  // The group is only needed for the membership test, which is the same for
  // every cache size.
  static const auto group = genus2_group({0, 1.0});
  while (true) {
    const DiskPoint p = uniform_in_ball(rng, FuchsianGroup::circumradius());
    if (group->in_fundamental_domain(p.z())) return p;
  }
}

UnitTangent uniform_fd_tangent(const FuchsianGroup& group, Rng& rng) {
  while (true) {
    const DiskPoint p = uniform_in_ball(rng, FuchsianGroup::circumradius());
    if (!group.in_fundamental_domain(p.z())) continue;
    return {p, rng.uniform(0.0, kTwoPi)};
  }
}

}  // namespace focalfree
