#include "cplab/renorm.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "cplab/parallel.hpp"

namespace cplab {

namespace {

void validateN(int N) {
  if (N < 2 || N % 2 != 0) throw std::invalid_argument("renorm: N must be even and positive");
}

}  // namespace

bool blockEventIndicator(const Vertex& v, int N, const PointConfiguration& config, double lambda,
                         double alpha) {
  validateN(N);
  const int d = config.dim();
  const double r = std::pow(static_cast<double>(N), alpha);
  const Vertex center = scaled(v, N);
  const std::vector<Vertex> annulus = ballVertices(center, d * N);
  const OccupiedField field = truncatedField(config, lambda, annulus, r);
  return connects(field, sphereVertices(center, d * N / 2.0), sphereVertices(center, d * N),
                  annulus);
}

std::vector<Vertex> goodVertices(const OccupiedField& sample, int N,
                                 const std::vector<Vertex>& blockIndexRegion) {
  validateN(N);
  if (blockIndexRegion.empty()) return {};
  const int d = blockIndexRegion.front().dim();
  const Vertex zero = origin(d);
  if (sample.indexOf(zero) < 0)
    throw std::invalid_argument("goodVertices: field sample does not contain the origin");
  const Cluster cluster = clusterOf(sample, {zero}, sample.region);
  const int halfRadius = d * N / 2;

  std::vector<Vertex> good;
  for (const Vertex& v : blockIndexRegion) {
    const Vertex center = scaled(v, N);
    for (const Vertex& m : cluster.members) {
      if (graphDistance(center, m) <= halfRadius) {
        good.push_back(v);
        break;
      }
    }
  }
  std::sort(good.begin(), good.end());
  return good;
}

IndependenceResult independenceCheck(int d, const Vertex& v, const Vertex& w, int N, double lambda,
                                     double alpha, long replicas, std::uint64_t masterSeed,
                                     int workers) {
  validateN(N);
  validateAlpha(d, alpha);
  if (replicas < 1) throw std::invalid_argument("independenceCheck: replicas must be positive");
  const Vertex cv = scaled(v, N), cw = scaled(w, N);
  const int separation = graphDistance(cv, cw);
  if (separation < 3 * d * N)
    throw std::invalid_argument("independenceCheck: separation d(vN,wN) >= 3dN violated");

  const double r = std::pow(static_cast<double>(N), alpha);
  const double readRadius = d * N + r;

  IndependenceResult result;
  result.readRadius = readRadius;
  // Two L1 balls of real radius rho are disjoint iff centers are farther
  // than 2*floor(rho) apart.
  result.regionsDisjoint = separation > 2 * static_cast<int>(std::floor(readRadius));

  const std::vector<Vertex> regionV = ballVertices(cv, d * N);
  const std::vector<Vertex> regionW = ballVertices(cw, d * N);
  const std::vector<Vertex> innerV = sphereVertices(cv, d * N / 2.0);
  const std::vector<Vertex> outerV = sphereVertices(cv, d * N);
  const std::vector<Vertex> innerW = sphereVertices(cw, d * N / 2.0);
  const std::vector<Vertex> outerW = sphereVertices(cw, d * N);

  std::vector<TargetBox> boxesV, boxesW;
  boxesV.reserve(regionV.size());
  boxesW.reserve(regionW.size());
  for (const Vertex& t : regionV) boxesV.push_back(makeTargetBox(t, r));
  for (const Vertex& t : regionW) boxesW.push_back(makeTargetBox(t, r));

  const SpaceTimeWindow window =
      makeWindow(sortedUnion(ballVertices(cv, readRadius), ballVertices(cw, readRadius)), -r);

  std::vector<std::uint8_t> indsV(static_cast<std::size_t>(replicas), 0);
  std::vector<std::uint8_t> indsW(static_cast<std::size_t>(replicas), 0);
  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    SweepWorkspace ws;

    OccupiedField fieldV;
    fieldV.region = regionV;
    fieldV.bits.resize(regionV.size());
    for (std::size_t t = 0; t < regionV.size(); ++t)
      fieldV.bits[t] = sweepOccupied(config, marks, boxesV[t], nullptr, ws) ? 1 : 0;
    indsV[static_cast<std::size_t>(i)] = connects(fieldV, innerV, outerV, regionV) ? 1 : 0;

    OccupiedField fieldW;
    fieldW.region = regionW;
    fieldW.bits.resize(regionW.size());
    for (std::size_t t = 0; t < regionW.size(); ++t)
      fieldW.bits[t] = sweepOccupied(config, marks, boxesW[t], nullptr, ws) ? 1 : 0;
    indsW[static_cast<std::size_t>(i)] = connects(fieldW, innerW, outerW, regionW) ? 1 : 0;
  });

  long cA = 0, cB = 0, cAB = 0;
  for (long i = 0; i < replicas; ++i) {
    cA += indsV[static_cast<std::size_t>(i)];
    cB += indsW[static_cast<std::size_t>(i)];
    cAB += indsV[static_cast<std::size_t>(i)] & indsW[static_cast<std::size_t>(i)];
  }
  result.probA = estimateFromCount(cA, replicas);
  result.probB = estimateFromCount(cB, replicas);

  const double R = static_cast<double>(replicas);
  const double pA = result.probA.mean, pB = result.probB.mean;
  const double pAB = static_cast<double>(cAB) / R;
  const double denom = std::sqrt(pA * (1 - pA) * pB * (1 - pB));
  result.corr.mean = denom > 0 ? (pAB - pA * pB) / denom : 0.0;
  result.corr.se = 1.0 / std::sqrt(R);  // null stderr of a sample correlation
  result.corr.replicas = replicas;
  return result;
}

std::vector<Vertex> selectSeparated(const std::vector<Vertex>& w, int minSeparation) {
  if (minSeparation < 1) throw std::invalid_argument("selectSeparated: separation must be >= 1");
  std::vector<Vertex> sorted = w;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<Vertex> kept;
  for (const Vertex& v : sorted) {
    bool ok = true;
    for (const Vertex& u : kept) {
      if (graphDistance(u, v) < minSeparation) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(v);
  }
  return kept;
}

BlockTailResult blockTailExperiment(int d, double lambda, int N, const std::vector<int>& sizes,
                                    int boxRadius, double alpha, long replicas,
                                    std::uint64_t masterSeed, int workers) {
  validateN(N);
  validateAlpha(d, alpha);
  if (sizes.empty()) throw std::invalid_argument("blockTailExperiment: empty size list");
  if (boxRadius < d * N)
    throw std::invalid_argument("blockTailExperiment: boxRadius must be at least dN");
  if (replicas < 1) throw std::invalid_argument("blockTailExperiment: replicas must be positive");

  const Vertex zero = origin(d);
  const double r = std::pow(static_cast<double>(N), alpha);
  const std::vector<Vertex> region = ballVertices(zero, boxRadius);
  const SpaceTimeWindow window = windowFor(region, r);
  const int originIdx = sortedIndexOf(region, zero);

  std::vector<TargetBox> boxes;
  boxes.reserve(region.size());
  std::vector<std::vector<int>> adjacency(region.size());
  std::vector<std::uint8_t> isEdge(region.size(), 0);
  for (std::size_t i = 0; i < region.size(); ++i) {
    boxes.push_back(makeTargetBox(region[i], r));
    for (const Vertex& nb : neighbors(region[i])) {
      const int j = sortedIndexOf(region, nb);
      if (j >= 0) adjacency[i].push_back(j);
    }
    if (graphDistance(zero, region[i]) == boxRadius) isEdge[i] = 1;
  }

  const std::vector<Vertex> inner = sphereVertices(zero, d * N / 2.0);
  const std::vector<Vertex> outer = sphereVertices(zero, d * N);
  const std::vector<Vertex> annulus = ballVertices(zero, d * N);
  const long ballHalf = static_cast<long>(ballVertices(zero, d * N / 2.0).size());
  const std::vector<Vertex> indexRegion =
      ballVertices(zero, (static_cast<double>(boxRadius) + d * N / 2.0) / N);

  struct Rep {
    long clusterSize = 0;
    long goodCount = 0;
    bool edgeTouch = false;
    bool blockEvent = false;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(replicas));

  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    SweepWorkspace ws;
    OccupiedField field;
    field.region = region;
    field.bits.resize(region.size());
    for (std::size_t t = 0; t < region.size(); ++t)
      field.bits[t] = sweepOccupied(config, marks, boxes[t], nullptr, ws) ? 1 : 0;

    Rep rep;
    std::vector<Vertex> members;
    if (field.bits[static_cast<std::size_t>(originIdx)]) {
      std::vector<std::uint8_t> seen(region.size(), 0);
      std::deque<int> queue;
      seen[static_cast<std::size_t>(originIdx)] = 1;
      queue.push_back(originIdx);
      while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        members.push_back(region[static_cast<std::size_t>(t)]);
        if (isEdge[static_cast<std::size_t>(t)]) rep.edgeTouch = true;
        for (int nb : adjacency[static_cast<std::size_t>(t)]) {
          if (seen[static_cast<std::size_t>(nb)] || !field.bits[static_cast<std::size_t>(nb)])
            continue;
          seen[static_cast<std::size_t>(nb)] = 1;
          queue.push_back(nb);
        }
      }
    }
    rep.clusterSize = static_cast<long>(members.size());

    const int halfRadius = d * N / 2;
    for (const Vertex& v : indexRegion) {
      const Vertex center = scaled(v, N);
      for (const Vertex& m : members) {
        if (graphDistance(center, m) <= halfRadius) {
          ++rep.goodCount;
          break;
        }
      }
    }
    rep.blockEvent = connects(field, inner, outer, annulus);
    reps[static_cast<std::size_t>(i)] = rep;
  });

  BlockTailResult result;
  result.sizes = sizes;
  result.ballHalfSize = ballHalf;
  std::vector<long> counts(sizes.size(), 0);
  long blockCount = 0, edgeCount = 0;
  for (const Rep& rep : reps) {
    for (std::size_t s = 0; s < sizes.size(); ++s)
      if (rep.clusterSize >= sizes[s]) ++counts[s];
    if (rep.blockEvent) ++blockCount;
    if (rep.edgeTouch) ++edgeCount;
    if (rep.clusterSize > rep.goodCount * ballHalf) ++result.coveringViolations;
  }
  for (std::size_t s = 0; s < sizes.size(); ++s)
    result.tail.push_back(estimateFromCount(counts[s], replicas));
  result.blockEventProb = estimateFromCount(blockCount, replicas);
  result.edgeTouchFraction = static_cast<double>(edgeCount) / static_cast<double>(replicas);
  return result;
}

}  // namespace cplab
