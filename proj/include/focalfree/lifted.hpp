#pragma once

// Points and tangents of the universal cover stored as (deck, local): a group
// element times a representative near the fundamental octagon. Far-away
// points keep full precision this way; resolve() gives plain model
// coordinates when those are still meaningful.

#include "focalfree/disk.hpp"
#include "focalfree/metric.hpp"

namespace focalfree {

struct LiftedPoint {
  Mobius deck;
  DiskPoint local;

  DiskPoint resolve() const { return deck.apply(local); }
};

struct LiftedTangent {
  Mobius deck;
  UnitTangent local;

  UnitTangent resolve() const { return deck.apply(local); }
  LiftedPoint point() const { return {deck, local.base}; }
  LiftedTangent reversed() const { return {deck, local.reversed()}; }
};

// Moves the local part into the octagon, compensating in the deck.
LiftedPoint normalize(const FuchsianGroup& group, const LiftedPoint& p);
LiftedTangent normalize(const FuchsianGroup& group, const LiftedTangent& v);

inline LiftedPoint lift(const ConformalMetric& metric, DiskPoint p) {
  return normalize(metric.group(), LiftedPoint{Mobius::identity(), p});
}
inline LiftedTangent lift(const ConformalMetric& metric, UnitTangent v) {
  return normalize(metric.group(), LiftedTangent{Mobius::identity(), v});
}

// from^-1 * to, replaced by the exact cached element when it is small.
Mobius relative_deck(const FuchsianGroup& group, const Mobius& from, const Mobius& to);

// q's local part expressed in p's local chart.
Complex relative_position(const FuchsianGroup& group, const LiftedPoint& p, const LiftedPoint& q);

// Hyperbolic (curvature -1) distance between lifted points.
double hyperbolic_distance(const FuchsianGroup& group, const LiftedPoint& p, const LiftedPoint& q);

}  // namespace focalfree
