#include "focalfree/lifted.hpp"

namespace focalfree {

LiftedPoint normalize(const FuchsianGroup& group, const LiftedPoint& p) {
  if (group.in_fundamental_domain(p.local.z())) return p;
  const Reduction r = fd_reduce(group, p.local);
  return {p.deck * r.alpha.inverse(), r.point};
}

LiftedTangent normalize(const FuchsianGroup& group, const LiftedTangent& v) {
  if (group.in_fundamental_domain(v.local.base.z())) return v;
  const Reduction r = fd_reduce(group, v.local.base);
  return {v.deck * r.alpha.inverse(), r.alpha.apply(v.local)};
}

Mobius relative_deck(const FuchsianGroup& group, const Mobius& from, const Mobius& to) {
  const Mobius raw = from.inverse() * to;
  if (raw.displacement() <= group.options().max_radius) {
    if (auto exact = group.snap(raw)) return *exact;
  }
  return raw;
}

Complex relative_position(const FuchsianGroup& group, const LiftedPoint& p, const LiftedPoint& q) {
  return relative_deck(group, p.deck, q.deck)(q.local.z());
}

double hyperbolic_distance(const FuchsianGroup& group, const LiftedPoint& p, const LiftedPoint& q) {
  return hyperbolic_distance(p.local.z(), relative_deck(group, p.deck, q.deck), q.local.z());
}

}  // namespace focalfree
