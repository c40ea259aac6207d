#pragma once

// Randomness. Every stream is derived from one master seed:
//   stream seed = splitmix64(master XOR splitmix64(stream index))
// and drives an mt19937_64; doubles are (x >> 11) * 2^-53. Both generators are
// fully specified, so sequences are reproducible across platforms.

#include <cstdint>
#include <random>

#include "focalfree/group.hpp"

namespace focalfree {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

// Uniform with respect to hyperbolic area on the closed octagon.
DiskPoint uniform_fd_point(Rng& rng);
// Liouville measure restricted to the octagon: uniform point, uniform direction.
UnitTangent uniform_fd_tangent(const FuchsianGroup& group, Rng& rng);

}  // namespace focalfree
