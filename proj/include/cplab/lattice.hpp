#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace cplab {

// Geometry of Z^d with nearest-neighbour edges. Distances are L1 (graph
// distance), vertex sets are always returned in lexicographic order so
// downstream traversals are deterministic.

class Vertex {
 public:
  // Coordinates are stored inline; kMaxDim caps the dimension so vertices
  // stay cheap to copy and hash in the samplers' inner loops.
  static constexpr int kMaxDim = 8;

  Vertex() : dim_(0) {}
  explicit Vertex(int dim);
  Vertex(std::initializer_list<int> coords);

  int dim() const { return dim_; }
  int operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  std::int16_t& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  bool operator==(const Vertex& o) const;
  bool operator!=(const Vertex& o) const { return !(*this == o); }
  bool operator<(const Vertex& o) const;  // lexicographic

  std::string str() const;  // "(x,y,...)"

 private:
  std::array<std::int16_t, kMaxDim> c_{};
  int dim_;
};

struct VertexHash {
  std::size_t operator()(const Vertex& v) const;
};

Vertex origin(int dim);

// Block center v scaled to the physical lattice, vN.
Vertex scaled(const Vertex& v, int factor);

// L1 distance; throws std::invalid_argument on dimension mismatch.
int graphDistance(const Vertex& u, const Vertex& v);

// Distance from v to the nearest element of a set (set nonempty).
int graphDistanceToSet(const Vertex& v, const std::vector<Vertex>& set);

// The 2d nearest neighbours of v, lexicographically sorted.
std::vector<Vertex> neighbors(const Vertex& v);

// Direction index k in [0, 2d) maps to a signed unit step; the ordering is
// fixed (axis-major, negative sign first) so samplers are reproducible.
Vertex neighborAlong(const Vertex& v, int dirIndex);
std::string directionName(int dirIndex);  // "-e1", "+e1", ...

// {w : d(center,w) <= radius}; radius >= 0, may be fractional.
std::vector<Vertex> ballVertices(const Vertex& center, double radius);

// {w : d(center,w) == floor(radius)}.
std::vector<Vertex> sphereVertices(const Vertex& center, double radius);

// Closed-form |ball| for d=2: 2n^2 + 2n + 1. General-d counts come from
// ballVertices().size().
std::uint64_t ballSize2d(int radius);

enum class RegionKind { Ball, Sphere };

struct Region {
  Vertex center;
  double radius = 0.0;
  RegionKind kind = RegionKind::Ball;

  std::vector<Vertex> vertices() const;
};

// Connected subsets of Z^2 of the given size containing the origin
// (site animals). Desk-scale enumeration: d=2 and size <= 8 only.
std::uint64_t countLatticeAnimals(int size);

// Sorted-set helpers used throughout; inputs must be lex-sorted.
bool sortedContains(const std::vector<Vertex>& sorted, const Vertex& v);
int sortedIndexOf(const std::vector<Vertex>& sorted, const Vertex& v);  // -1 absent
std::vector<Vertex> sortedUnion(const std::vector<Vertex>& a, const std::vector<Vertex>& b);

}  // namespace cplab
