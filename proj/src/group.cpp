#include "focalfree/group.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <mutex>

namespace focalfree {

namespace {

constexpr double kCellSize = 1.0;

// Hyperboloid coordinates X1 + i X2 of m(0); distinct orbit points are at
// least 2 * inradius apart and X-space distance dominates hyperbolic distance.
Complex hyperboloid_xy(const Mobius& m) { return 2.0 * m.a() * m.b(); }

}  // namespace

double FuchsianGroup::inradius() { return std::acosh(1.0 / std::tan(kPi / 8.0)); }

double FuchsianGroup::circumradius() {
  const double c = 1.0 / std::tan(kPi / 8.0);
  return std::acosh(c * c);
}

FuchsianGroup::FuchsianGroup(WordCacheOptions options) : options_(options) {
  if (options.max_word_length < 0 || !(options.max_radius > 0.0))
    throw DomainError("word cache needs max_word_length >= 0 and max_radius > 0");

  const double step = 2.0 * inradius();
  for (int k = 0; k < 8; ++k) {
    const double phi = k * kPi / 4.0;
    generators_[k] = Mobius::rotation(phi) * Mobius::translation(step) * Mobius::rotation(-phi);
    neighbours_[k] = generators_[k].orbit_origin();
    vertices_[k] = DiskPoint::from(std::polar(std::tanh(circumradius() / 2.0), kPi / 8.0 + phi));
  }
  side_factor_ = 1.0 - std::norm(neighbours_[0]);

  // Breadth-first enumeration. Expansion runs out to max_radius + circumradius
  // so that the stored ball of radius max_radius is complete: the tiles met
  // by the segment [0, alpha(0)] give a word whose prefixes stay within the
  // circumradius of that segment.
  const double expand_radius = options.max_radius + circumradius();
  struct Node {
    Mobius m;
    int length;
    std::uint32_t parent;
    std::int8_t last;
  };
  std::vector<Node> nodes{{Mobius::identity(), 0, 0, -1}};
  std::unordered_map<CellKey, std::vector<std::uint32_t>> seen;
  seen[cell_key(hyperboloid_xy(nodes[0].m))].push_back(0);

  auto find_node = [&](const Mobius& m) -> bool {
    const Complex x = hyperboloid_xy(m);
    const auto cx = static_cast<std::int64_t>(std::floor(x.real() / kCellSize));
    const auto cy = static_cast<std::int64_t>(std::floor(x.imag() / kCellSize));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = seen.find(((cx + dx) << 32) ^ (cy + dy));
        if (it == seen.end()) continue;
        for (auto idx : it->second)
          if ((nodes[idx].m.inverse() * m).displacement() < 1e-3) return true;
      }
    return false;
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].length >= options.max_word_length) continue;
    for (int k = 0; k < 8; ++k) {
      if (nodes[i].last >= 0 && k == inverse_index(nodes[i].last)) continue;
      Mobius m = (nodes[i].m * generators_[k]).renormalized();
      if (m.displacement() > expand_radius) continue;
      if (find_node(m)) continue;
      nodes.push_back({m, nodes[i].length + 1, static_cast<std::uint32_t>(i), static_cast<std::int8_t>(k)});
      seen[cell_key(hyperboloid_xy(m))].push_back(static_cast<std::uint32_t>(nodes.size() - 1));
    }
  }

  for (const auto& node : nodes) {
    const double d = node.m.displacement();
    if (d > options.max_radius) continue;
    GroupElement e{node.m, node.length, d, {}};
    e.word.resize(node.length);
    const Node* cur = &node;
    for (int pos = node.length - 1; pos >= 0; --pos) {
      e.word[pos] = cur->last;
      cur = &nodes[cur->parent];
    }
    elements_.push_back(std::move(e));
    insert_cell(elements_.size() - 1, hyperboloid_xy(node.m));
  }
}

FuchsianGroup::CellKey FuchsianGroup::cell_key(Complex x) {
  const auto cx = static_cast<std::int64_t>(std::floor(x.real() / kCellSize));
  const auto cy = static_cast<std::int64_t>(std::floor(x.imag() / kCellSize));
  return (cx << 32) ^ cy;
}

void FuchsianGroup::insert_cell(std::size_t index, Complex x) {
  cells_[cell_key(x)].push_back(static_cast<std::uint32_t>(index));
}

std::size_t FuchsianGroup::count_up_to_length(int length) const {
  std::size_t n = 0;
  for (const auto& e : elements_)
    if (e.length <= length) ++n;
  return n;
}

bool FuchsianGroup::in_fundamental_domain(Complex z, double slack) const {
  // d(z, 0) <= d(z, w_k)  <=>  |z - w_k|^2 >= (1 - |w_k|^2) |z|^2
  const double lhs = side_factor_ * std::norm(z);
  for (const auto& w : neighbours_)
    if (std::norm(z - w) < lhs * (1.0 - slack)) return false;
  return true;
}

int FuchsianGroup::violated_side(Complex z) const {
  const double lhs = side_factor_ * std::norm(z);
  int best = -1;
  double best_norm = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double n = std::norm(z - neighbours_[k]);
    if (n < lhs && (best < 0 || n < best_norm)) {
      best = k;
      best_norm = n;
    }
  }
  return best;
}

std::optional<Mobius> FuchsianGroup::snap(const Mobius& approx, double tol) const {
  const Complex x = hyperboloid_xy(approx);
  const auto cx = static_cast<std::int64_t>(std::floor(x.real() / kCellSize));
  const auto cy = static_cast<std::int64_t>(std::floor(x.imag() / kCellSize));
  for (std::int64_t dx = -1; dx <= 1; ++dx)
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      auto it = cells_.find(((cx + dx) << 32) ^ (cy + dy));
      if (it == cells_.end()) continue;
      for (auto idx : it->second) {
        const Mobius& m = elements_[idx].m;
        if ((m.inverse() * approx).displacement() < tol) {
          const Mobius neg(-m.a(), -m.b());
          const double dp = std::abs(m.a() - approx.a()) + std::abs(m.b() - approx.b());
          const double dn = std::abs(neg.a() - approx.a()) + std::abs(neg.b() - approx.b());
          return dp <= dn ? m : neg;
        }
      }
    }
  return std::nullopt;
}

std::shared_ptr<const FuchsianGroup> genus2_group(WordCacheOptions options) {
  static std::mutex mutex;
  static std::map<WordCacheOptions, std::shared_ptr<const FuchsianGroup>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[options];
  if (!slot) slot = std::make_shared<const FuchsianGroup>(options);
  return slot;
}

Reduction fd_reduce(const FuchsianGroup& group, DiskPoint p) {
  if (!p.valid()) throw DomainError("fd_reduce: point outside the open disk");
  Reduction r{p, Mobius::identity(), {}};
  Complex z = p.z();
  for (int iter = 0; iter < 100000; ++iter) {
    const int k = group.violated_side(z);
    if (k < 0) {
      r.point = DiskPoint::from(z);
      return r;
    }
    const Mobius& inv = group.generators()[FuchsianGroup::inverse_index(k)];
    z = inv(z);
    r.alpha = inv * r.alpha;
    r.word.push_back(k);
  }
  throw SolverFailure("fd_reduce did not terminate", std::abs(z));
}

}  // namespace focalfree
