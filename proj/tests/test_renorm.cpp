#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cplab/renorm.hpp"
#include "oracles.hpp"

using namespace cplab;

namespace {

OccupiedField fieldFromBits(const std::vector<Vertex>& region, std::vector<std::uint8_t> bits) {
  OccupiedField f;
  f.region = region;
  f.bits = std::move(bits);
  return f;
}

PointConfiguration lateStarConfig(const SpaceTimeWindow& window) {
  std::vector<SpaceTimePoint> pts;
  for (const Vertex& v : window.region) {
    SpaceTimePoint p;
    p.vertex = v;
    p.time = -0.05;
    p.u = 0.0;
    pts.push_back(p);
  }
  return PointConfiguration(window, pts);
}

}  // namespace

TEST_CASE("blockEventIndicator on saturated, dead and random configurations") {
  const int N = 2, d = 2;
  const double alpha = 0.5;
  const double r = std::pow(static_cast<double>(N), alpha);
  const Vertex zero = origin(d);
  const SpaceTimeWindow window = makeWindow(ballVertices(zero, d * N + r), -r);

  const PointConfiguration allOccupied(window, {});
  CHECK(blockEventIndicator(zero, N, allOccupied, 0.5, alpha));

  const PointConfiguration dead = lateStarConfig(window);
  CHECK(!blockEventIndicator(zero, N, dead, 0.5, alpha));

  const auto annulus = ballVertices(zero, d * N);
  const auto inner = sphereVertices(zero, d * N / 2.0);
  const auto outer = sphereVertices(zero, d * N);
  for (int trial = 0; trial < 80; ++trial) {
    RandomStream rng(seedFor(808, static_cast<std::uint64_t>(trial)));
    const auto cfg = samplePoints(window, rng);
    const double lambda = 0.3 + rng.uniform01();
    const bool got = blockEventIndicator(zero, N, cfg, lambda, alpha);
    const auto field = truncatedField(cfg, lambda, annulus, r);
    CHECK(got == oracles::connectsDfs(field, inner, outer, annulus));
  }

  const PointConfiguration tiny(makeWindow(ballVertices(zero, 2), -r), {});
  CHECK_THROWS_AS(blockEventIndicator(zero, N, tiny, 0.5, alpha), std::invalid_argument);
  CHECK_THROWS_AS(blockEventIndicator(zero, 3, allOccupied, 0.5, alpha), std::invalid_argument);
}

TEST_CASE("goodVertices: dead origin, saturated field, covering inequality per sample") {
  const int N = 2, d = 2;
  const int boxRadius = 6;
  const auto region = ballVertices(origin(d), boxRadius);
  const auto indexRegion =
      ballVertices(origin(d), (static_cast<double>(boxRadius) + d * N / 2.0) / N);
  const long ballHalf = static_cast<long>(ballVertices(origin(d), d * N / 2.0).size());

  std::vector<std::uint8_t> zeroDead(region.size(), 1);
  zeroDead[static_cast<std::size_t>(sortedIndexOf(region, origin(d)))] = 0;
  CHECK(goodVertices(fieldFromBits(region, zeroDead), N, indexRegion).empty());

  const auto full = fieldFromBits(region, std::vector<std::uint8_t>(region.size(), 1));
  CHECK(goodVertices(full, N, indexRegion) == indexRegion);

  RandomStream rng(909);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> bits(region.size());
    for (auto& b : bits) b = rng.uniform01() < 0.55 ? 1 : 0;
    const auto field = fieldFromBits(region, bits);
    const auto cluster = clusterOf(field, {origin(d)}, region);
    const auto good = goodVertices(field, N, indexRegion);
    // |C| >= n forces |S| >= n / |Lambda_{dN/2}|, i.e. |C| <= |S| * |Lambda_{dN/2}|
    CHECK(static_cast<long>(cluster.members.size()) <=
          static_cast<long>(good.size()) * ballHalf);
  }
}

TEST_CASE("good vertices outside Lambda_d imply the block event on the same sample") {
  const int N = 2, d = 2;
  const int boxRadius = 10;  // room for ball(vN, dN) around off-origin blocks
  const auto region = ballVertices(origin(d), boxRadius);
  const auto indexRegion =
      ballVertices(origin(d), (static_cast<double>(boxRadius) + d * N / 2.0) / N);
  RandomStream rng(910);
  for (int trial = 0; trial < 120; ++trial) {
    std::vector<std::uint8_t> bits(region.size());
    for (auto& b : bits) b = rng.uniform01() < 0.6 ? 1 : 0;
    const auto field = fieldFromBits(region, bits);
    for (const Vertex& v : goodVertices(field, N, indexRegion)) {
      if (graphDistance(origin(d), v) <= d) continue;  // exclusion band Lambda_d
      const Vertex center = scaled(v, N);
      const auto annulus = ballVertices(center, d * N);
      bool contained = true;
      for (const Vertex& a : annulus)
        if (!sortedContains(region, a)) {
          contained = false;
          break;
        }
      if (!contained) continue;
      CHECK(oracles::connectsDfs(field, sphereVertices(center, d * N / 2.0),
                                 sphereVertices(center, d * N), annulus));
    }
  }
}

TEST_CASE("independenceCheck: geometry validation and a null correlation") {
  CHECK_THROWS_AS(independenceCheck(2, origin(2), Vertex{5, 0}, 2, 0.8, 0.5, 10, 1),
                  std::invalid_argument);  // d(vN,wN) = 10 < 3dN = 12

  const IndependenceResult res =
      independenceCheck(2, origin(2), Vertex{6, 0}, 2, 0.8, 0.5, 2000, 515, 2);
  // 2(dN + N^alpha) = 2(4 + sqrt 2) < 12 = 3dN: disjoint reads
  CHECK(res.regionsDisjoint);
  CHECK(std::abs(res.corr.mean) <= 3.0 * res.corr.se);
  // translation invariance: the two marginals match within noise
  CHECK(std::abs(res.probA.mean - res.probB.mean) <=
        3.0 * std::sqrt(res.probA.se * res.probA.se + res.probB.se * res.probB.se));
}

TEST_CASE("blockTailExperiment: covering holds on every sample, probabilities are monotone") {
  const BlockTailResult res =
      blockTailExperiment(2, 0.45, 2, {0, 1, 2, 4, 8, 16, 1000}, 8, 0.5, 1500, 616, 2);
  CHECK(res.coveringViolations == 0);
  CHECK(res.tail.front().mean == doctest::Approx(1.0));
  CHECK(res.tail.back().mean == doctest::Approx(0.0));  // beyond |box|
  for (std::size_t s = 1; s < res.tail.size(); ++s)
    CHECK(res.tail[s].mean <= res.tail[s - 1].mean);
  CHECK(res.ballHalfSize == 13);  // |Lambda_2| for d=2, N=2

  CHECK_THROWS_AS(blockTailExperiment(2, 0.45, 2, {1}, 3, 0.5, 10, 7), std::invalid_argument);
}

TEST_CASE("selectSeparated keeps a pairwise separated subset covering the input") {
  const int d = 2;
  const auto w = ballVertices(origin(d), 5);
  const auto kept = selectSeparated(w, 3 * d);
  CHECK(!kept.empty());
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      CHECK(graphDistance(kept[i], kept[j]) >= 3 * d);
  // greedy maximality: every dropped vertex conflicts with a kept one
  for (const Vertex& v : w) {
    if (sortedContains(kept, v)) continue;
    bool conflicted = false;
    for (const Vertex& u : kept)
      if (graphDistance(u, v) < 3 * d) conflicted = true;
    CHECK(conflicted);
  }
  CHECK_THROWS_AS(selectSeparated(w, 0), std::invalid_argument);
}

TEST_CASE("block event probability decays in N on shared configurations") {
  const double alpha = 0.5, lambda = 0.3;
  const int d = 2;
  const double rMax = std::pow(6.0, alpha);
  const SpaceTimeWindow window = makeWindow(ballVertices(origin(d), d * 6 + rMax), -rMax);
  long hits2 = 0, hits4 = 0, hits6 = 0;
  const long reps = 600;
  for (long i = 0; i < reps; ++i) {
    RandomStream rng(seedFor(717, static_cast<std::uint64_t>(i)));
    const auto cfg = samplePoints(window, rng);
    hits2 += blockEventIndicator(origin(d), 2, cfg, lambda, alpha) ? 1 : 0;
    hits4 += blockEventIndicator(origin(d), 4, cfg, lambda, alpha) ? 1 : 0;
    hits6 += blockEventIndicator(origin(d), 6, cfg, lambda, alpha) ? 1 : 0;
  }
  CHECK(hits2 >= hits4);
  CHECK(hits4 >= hits6);
}
