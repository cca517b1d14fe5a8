#include <doctest.h>

#include <algorithm>

#include "cplab/lattice.hpp"
#include "cplab/random.hpp"
#include "oracles.hpp"

using namespace cplab;

TEST_CASE("graph distance is L1") {
  CHECK(graphDistance(Vertex{0, 0}, Vertex{0, 0}) == 0);
  CHECK(graphDistance(Vertex{0, 0}, Vertex{2, -1}) == 3);
  CHECK(graphDistance(Vertex{1, 1, 1}, Vertex{0, 0, 0}) == 3);
  CHECK_THROWS_AS(graphDistance(Vertex{0, 0}, Vertex{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("graph distance is a metric on random triples") {
  RandomStream rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniformInt(3));
    Vertex u(d), v(d), w(d);
    for (int i = 0; i < d; ++i) {
      u[i] = static_cast<int>(rng.uniformInt(21)) - 10;
      v[i] = static_cast<int>(rng.uniformInt(21)) - 10;
      w[i] = static_cast<int>(rng.uniformInt(21)) - 10;
    }
    CHECK(graphDistance(u, v) == graphDistance(v, u));
    CHECK(graphDistance(u, v) + graphDistance(v, w) >= graphDistance(u, w));
    CHECK((graphDistance(u, v) == 0) == (u == v));
  }
}

TEST_CASE("ball and sphere vertex sets") {
  const Vertex zero = origin(2);
  CHECK(ballVertices(zero, 0).size() == 1);
  CHECK(ballVertices(zero, 0).front() == zero);
  CHECK(ballVertices(zero, 2).size() == 13);
  CHECK(ballVertices(origin(3), 1).size() == 7);
  CHECK(sphereVertices(zero, 2).size() == 8);
  CHECK(sphereVertices(zero, 2.9) == sphereVertices(zero, 2));
  CHECK(sphereVertices(origin(4), 0) == std::vector<Vertex>{origin(4)});
  CHECK_THROWS_AS(ballVertices(zero, -1.0), std::invalid_argument);
}

TEST_CASE("sphere subsets ball and shells tile it") {
  RandomStream rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniformInt(2));
    Vertex c(d);
    for (int i = 0; i < d; ++i) c[i] = static_cast<int>(rng.uniformInt(9)) - 4;
    const double r = rng.uniform01() * 4.0;
    const auto ball = ballVertices(c, r);
    const auto sph = sphereVertices(c, r);
    for (const Vertex& v : sph) CHECK(sortedContains(ball, v));

    std::vector<Vertex> shellUnion;
    for (int k = 0; k <= static_cast<int>(r); ++k) {
      const auto s = sphereVertices(c, k);
      shellUnion.insert(shellUnion.end(), s.begin(), s.end());
    }
    std::sort(shellUnion.begin(), shellUnion.end());
    CHECK(shellUnion == ball);
  }
}

TEST_CASE("ball size is translation invariant and lex sorted") {
  const auto base = ballVertices(origin(2), 3);
  CHECK(std::is_sorted(base.begin(), base.end()));
  for (int x = -3; x <= 3; x += 3) {
    for (int y = -2; y <= 2; y += 2) {
      const auto moved = ballVertices(Vertex{x, y}, 3);
      CHECK(moved.size() == base.size());
      CHECK(std::is_sorted(moved.begin(), moved.end()));
    }
  }
}

TEST_CASE("region type dispatches on kind") {
  Region ball{Vertex{0, 0}, 2.0, RegionKind::Ball};
  Region sphere{Vertex{0, 0}, 2.0, RegionKind::Sphere};
  CHECK(ball.vertices().size() == 13);
  CHECK(sphere.vertices().size() == 8);
}

TEST_CASE("lattice animal counts match the subset-scan oracle") {
  CHECK(countLatticeAnimals(1) == 1);
  CHECK(countLatticeAnimals(2) == 4);
  for (int size = 1; size <= 5; ++size)
    CHECK(countLatticeAnimals(size) == oracles::countAnimalsBySubsetScan(size));
  CHECK_THROWS_AS(countLatticeAnimals(9), std::invalid_argument);
  CHECK_THROWS_AS(countLatticeAnimals(0), std::invalid_argument);
}

TEST_CASE("neighbors are lex sorted and at distance one") {
  const Vertex v{1, -2, 3};
  const auto nbs = neighbors(v);
  CHECK(nbs.size() == 6);
  CHECK(std::is_sorted(nbs.begin(), nbs.end()));
  for (const Vertex& nb : nbs) CHECK(graphDistance(v, nb) == 1);
}
