#include "cplab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

namespace cplab {

Vertex::Vertex(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vertex: dimension out of range");
}

Vertex::Vertex(std::initializer_list<int> coords) : dim_(static_cast<int>(coords.size())) {
  if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("Vertex: dimension out of range");
  int i = 0;
  for (int x : coords) c_[static_cast<std::size_t>(i++)] = static_cast<std::int16_t>(x);
}

bool Vertex::operator==(const Vertex& o) const {
  if (dim_ != o.dim_) return false;
  for (int i = 0; i < dim_; ++i)
    if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)]) return false;
  return true;
}

bool Vertex::operator<(const Vertex& o) const {
  if (dim_ != o.dim_) return dim_ < o.dim_;
  for (int i = 0; i < dim_; ++i) {
    const auto a = c_[static_cast<std::size_t>(i)], b = o.c_[static_cast<std::size_t>(i)];
    if (a != b) return a < b;
  }
  return false;
}

std::string Vertex::str() const {
  std::string s = "(";
  for (int i = 0; i < dim_; ++i) {
    if (i) s += ",";
    s += std::to_string(c_[static_cast<std::size_t>(i)]);
  }
  s += ")";
  return s;
}

std::size_t VertexHash::operator()(const Vertex& v) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    h ^= x;
    h *= 0x100000001b3ULL;
  };
  mix(static_cast<std::uint64_t>(v.dim()));
  for (int i = 0; i < v.dim(); ++i) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v[i])));
  return static_cast<std::size_t>(h);
}

Vertex origin(int dim) { return Vertex(dim); }

Vertex scaled(const Vertex& v, int factor) {
  Vertex r(v.dim());
  for (int i = 0; i < v.dim(); ++i) r[i] = v[i] * factor;
  return r;
}

int graphDistance(const Vertex& u, const Vertex& v) {
  if (u.dim() != v.dim()) throw std::invalid_argument("graphDistance: dimension mismatch");
  int d = 0;
  for (int i = 0; i < u.dim(); ++i) d += std::abs(u[i] - v[i]);
  return d;
}

int graphDistanceToSet(const Vertex& v, const std::vector<Vertex>& set) {
  if (set.empty()) throw std::invalid_argument("graphDistanceToSet: empty set");
  int best = graphDistance(v, set.front());
  for (const Vertex& w : set) best = std::min(best, graphDistance(v, w));
  return best;
}

std::vector<Vertex> neighbors(const Vertex& v) {
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(2 * v.dim()));
  for (int k = 0; k < 2 * v.dim(); ++k) out.push_back(neighborAlong(v, k));
  std::sort(out.begin(), out.end());
  return out;
}

Vertex neighborAlong(const Vertex& v, int dirIndex) {
  if (dirIndex < 0 || dirIndex >= 2 * v.dim()) throw std::invalid_argument("neighborAlong: bad direction");
  Vertex r = v;
  const int axis = dirIndex / 2;
  const int sign = (dirIndex % 2 == 0) ? -1 : +1;
  r[axis] = r[axis] + sign;
  return r;
}

std::string directionName(int dirIndex) {
  const int axis = dirIndex / 2;
  const int sign = (dirIndex % 2 == 0) ? -1 : +1;
  return std::string(sign < 0 ? "-e" : "+e") + std::to_string(axis + 1);
}

namespace {

// Enumerates offsets coordinate by coordinate with a remaining L1 budget;
// ascending first coordinate makes the output lexicographic by construction.
void enumerateOffsets(const Vertex& center, int axis, int budget, bool exact, Vertex& cur,
                      std::vector<Vertex>& out) {
  const int d = center.dim();
  if (axis == d - 1) {
    if (exact) {
      if (budget == 0) {
        cur[axis] = center[axis];
        out.push_back(cur);
      } else {
        cur[axis] = center[axis] - budget;
        out.push_back(cur);
        cur[axis] = center[axis] + budget;
        out.push_back(cur);
      }
    } else {
      for (int off = -budget; off <= budget; ++off) {
        cur[axis] = center[axis] + off;
        out.push_back(cur);
      }
    }
    return;
  }
  for (int off = -budget; off <= budget; ++off) {
    cur[axis] = center[axis] + off;
    enumerateOffsets(center, axis + 1, budget - std::abs(off), exact, cur, out);
  }
}

}  // namespace

std::vector<Vertex> ballVertices(const Vertex& center, double radius) {
  if (radius < 0) throw std::invalid_argument("ballVertices: negative radius");
  const int r = static_cast<int>(std::floor(radius));
  std::vector<Vertex> out;
  Vertex cur = center;
  enumerateOffsets(center, 0, r, /*exact=*/false, cur, out);
  return out;
}

std::vector<Vertex> sphereVertices(const Vertex& center, double radius) {
  if (radius < 0) throw std::invalid_argument("sphereVertices: negative radius");
  const int r = static_cast<int>(std::floor(radius));
  std::vector<Vertex> out;
  Vertex cur = center;
  enumerateOffsets(center, 0, r, /*exact=*/true, cur, out);
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t ballSize2d(int radius) {
  const auto n = static_cast<std::uint64_t>(radius);
  return 2 * n * n + 2 * n + 1;
}

std::vector<Vertex> Region::vertices() const {
  return kind == RegionKind::Ball ? ballVertices(center, radius) : sphereVertices(center, radius);
}

namespace {

struct SubsetKey {
  // Packs a sorted list of 2d vertices into a flat int sequence for hashing.
  std::vector<std::int32_t> packed;
  bool operator==(const SubsetKey& o) const { return packed == o.packed; }
};

struct SubsetKeyHash {
  std::size_t operator()(const SubsetKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int32_t x : k.packed) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

SubsetKey keyOf(const std::vector<Vertex>& sortedMembers) {
  SubsetKey k;
  k.packed.reserve(sortedMembers.size() * 2);
  for (const Vertex& v : sortedMembers) {
    k.packed.push_back(v[0]);
    k.packed.push_back(v[1]);
  }
  return k;
}

}  // namespace

std::uint64_t countLatticeAnimals(int size) {
  if (size < 1) throw std::invalid_argument("countLatticeAnimals: size must be positive");
  if (size > 8) throw std::invalid_argument("countLatticeAnimals: size beyond enumeration limit (8)");
  // Grow connected sets containing the origin one vertex at a time,
  // deduplicating by the sorted member list. Connectivity is preserved by
  // only ever attaching a neighbour of a current member.
  std::vector<std::vector<Vertex>> current = {{origin(2)}};
  for (int k = 1; k < size; ++k) {
    std::unordered_set<SubsetKey, SubsetKeyHash> seen;
    std::vector<std::vector<Vertex>> next;
    for (const auto& s : current) {
      for (const Vertex& m : s) {
        for (const Vertex& nb : neighbors(m)) {
          if (std::binary_search(s.begin(), s.end(), nb)) continue;
          std::vector<Vertex> t = s;
          t.insert(std::upper_bound(t.begin(), t.end(), nb), nb);
          if (seen.insert(keyOf(t)).second) next.push_back(std::move(t));
        }
      }
    }
    current = std::move(next);
  }
  return current.size();
}

bool sortedContains(const std::vector<Vertex>& sorted, const Vertex& v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

int sortedIndexOf(const std::vector<Vertex>& sorted, const Vertex& v) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
  if (it == sorted.end() || !(*it == v)) return -1;
  return static_cast<int>(it - sorted.begin());
}

std::vector<Vertex> sortedUnion(const std::vector<Vertex>& a, const std::vector<Vertex>& b) {
  std::vector<Vertex> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace cplab
