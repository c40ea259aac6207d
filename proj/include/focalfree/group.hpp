#pragma once

// The genus-2 surface group acting on the disk: side pairings of the regular
// octagon with interior angles pi/4, a word cache, and fundamental-domain
// reduction.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "focalfree/disk.hpp"

namespace focalfree {

struct WordCacheOptions {
  int max_word_length = 10;
  // Words are also cut at this displacement of the origin. Enumerating every
  // word of length 10 means ~4e8 elements, so the cache is a complete ball of
  // this radius intersected with the word-length limit.
  double max_radius = 12.0;

  bool operator<(const WordCacheOptions& o) const {
    return max_word_length != o.max_word_length ? max_word_length < o.max_word_length
                                                : max_radius < o.max_radius;
  }
};

struct GroupElement {
  Mobius m;
  int length = 0;             // minimal word length found by breadth-first search
  double displacement = 0.0;  // d(0, m(0))
  std::vector<std::int8_t> word;  // generator indices, applied left to right
};

class FuchsianGroup {
 public:
  explicit FuchsianGroup(WordCacheOptions options = {});

  // g_k translates the origin by twice the inradius in direction k*pi/4;
  // g_{k+4} is the inverse of g_k.
  const std::array<Mobius, 8>& generators() const { return generators_; }
  const std::array<DiskPoint, 8>& fd_vertices() const { return vertices_; }
  // a b c d a^-1 b^-1 c^-1 d^-1 in terms of generator indices.
  static constexpr std::array<int, 8> relator{0, 3, 6, 1, 4, 7, 2, 5};
  static int inverse_index(int k) { return (k + 4) % 8; }

  static double inradius();       // cosh r = cot(pi/8)
  static double circumradius();   // cosh R = cot^2(pi/8) = 3 + 2 sqrt 2

  const WordCacheOptions& options() const { return options_; }
  // Cached elements in nondecreasing word length; elements()[0] is the identity.
  const std::vector<GroupElement>& elements() const { return elements_; }
  std::size_t count_up_to_length(int length) const;

  bool in_fundamental_domain(Complex z, double slack = 0.0) const;
  // Index k with d(z, g_k 0) < d(z, 0) and |z - g_k 0| minimal, or -1.
  int violated_side(Complex z) const;

  // Cached element whose orbit point lies within tol (hyperbolic) of approx(0),
  // returned with the sign closest to approx.
  std::optional<Mobius> snap(const Mobius& approx, double tol = 1e-3) const;

 private:
  using CellKey = std::int64_t;
  static CellKey cell_key(Complex x);
  void insert_cell(std::size_t index, Complex x);

  WordCacheOptions options_;
  std::array<Mobius, 8> generators_;
  std::array<DiskPoint, 8> vertices_;
  std::array<Complex, 8> neighbours_;  // g_k(0)
  double side_factor_ = 0.0;           // 1 - |g_k(0)|^2
  std::vector<GroupElement> elements_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>> cells_;
};

// Shared, lazily built instances (the cache is immutable once built).
std::shared_ptr<const FuchsianGroup> genus2_group(WordCacheOptions options = {});

struct Reduction {
  DiskPoint point;
  Mobius alpha;  // alpha(p) = point
  std::vector<int> word;  // generators whose inverses were applied, in order
};

// Moves p into the closed octagon by repeatedly crossing the most violated
// side. Ties go to the closest neighbour, then to the smallest index.
Reduction fd_reduce(const FuchsianGroup& group, DiskPoint p);

}  // namespace focalfree
