#include <doctest.h>

#include <cmath>
#include <set>

#include "cplab/random.hpp"

using namespace cplab;

TEST_CASE("seedFor is injective over replica indices") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(seedFor(42, i));
  CHECK(seen.size() == 10000);
}

TEST_CASE("fixed seed reproduces the stream prefix") {
  RandomStream a(seedFor(7, 3));
  RandomStream b(seedFor(7, 3));
  for (int i = 0; i < 100; ++i) CHECK(a.nextUInt64() == b.nextUInt64());
}

TEST_CASE("uniform01 stays in [0,1) and exponential is positive") {
  RandomStream rng(5);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double e = rng.exponential();
    CHECK(e > 0.0);
    sum += e;
  }
  CHECK(std::abs(sum / 20000.0 - 1.0) < 0.03);  // mean-1 exponential
}

TEST_CASE("substream tags decorrelate pool seeds") {
  CHECK(substream(9, 1) != substream(9, 2));
  CHECK(substream(9, 1) != seedFor(9, 1));
}
