#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace oracles {

using cplab::Mark;
using cplab::OccupiedField;
using cplab::PointConfiguration;
using cplab::Vertex;

bool connectedSet(const std::vector<Vertex>& members) {
  if (members.empty()) return true;
  std::vector<Vertex> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  std::unordered_set<Vertex, cplab::VertexHash> seen;
  std::function<void(const Vertex&)> visit = [&](const Vertex& u) {
    seen.insert(u);
    for (const Vertex& nb : cplab::neighbors(u))
      if (cplab::sortedContains(sorted, nb) && !seen.count(nb)) visit(nb);
  };
  visit(sorted.front());
  return seen.size() == sorted.size();
}

std::uint64_t countAnimalsBySubsetScan(int size) {
  if (size < 1 || size > 5) throw std::invalid_argument("subset-scan oracle supports sizes 1..5");
  const Vertex zero = cplab::origin(2);
  if (size == 1) return 1;
  std::vector<Vertex> pool = cplab::ballVertices(zero, size - 1);
  pool.erase(std::remove(pool.begin(), pool.end(), zero), pool.end());

  std::uint64_t count = 0;
  std::vector<Vertex> chosen = {zero};
  std::function<void(std::size_t, int)> pick = [&](std::size_t from, int remaining) {
    if (remaining == 0) {
      if (connectedSet(chosen)) ++count;
      return;
    }
    for (std::size_t i = from; i + static_cast<std::size_t>(remaining) <= pool.size(); ++i) {
      chosen.push_back(pool[i]);
      pick(i + 1, remaining - 1);
      chosen.pop_back();
    }
  };
  pick(0, size - 1);
  return count;
}

namespace {

struct MemoKey {
  Vertex vertex;
  int eventIdx;  // -1 for the top-level call at time 0
  bool operator==(const MemoKey& o) const { return vertex == o.vertex && eventIdx == o.eventIdx; }
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const {
    return cplab::VertexHash{}(k.vertex) * 1000003u + static_cast<std::size_t>(k.eventIdx + 1);
  }
};

}  // namespace

bool truncatedBit(const PointConfiguration& config, const std::vector<Mark>& marks,
                  const Vertex& v, double r) {
  const int shell = static_cast<int>(std::floor(r));
  const auto& pts = config.points();
  std::unordered_map<MemoKey, bool, MemoKeyHash> memo;

  // active(u, tau): does a source-path reach (u, tau-)? `inclusive` widens
  // the event range to time == tau for the final evaluation at time 0.
  std::function<bool(const Vertex&, double, bool, int)> active = [&](const Vertex& u, double tau,
                                                                     bool inclusive,
                                                                     int keyIdx) -> bool {
    const MemoKey key{u, keyIdx};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    const int du = cplab::graphDistance(v, u);
    bool result = false;
    if (du == shell) {
      result = true;  // shell axes are sources at every time in [-r, 0)
    } else {
      double lastStar = -r;
      bool sawStar = false;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i].vertex == u) || !marks[i].isStar) continue;
        const double t = pts[i].time;
        if (t <= -r) continue;
        if (t < tau || (inclusive && t == tau)) {
          if (t > lastStar) lastStar = t;
          sawStar = true;
        }
      }
      if (!sawStar && du < shell) {
        result = true;  // alive since the floor at -r
      } else {
        const double lower = sawStar ? lastStar : -r;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (marks[i].isStar) continue;
          const double t = pts[i].time;
          if (t <= lower || t > tau || (!inclusive && t == tau)) continue;
          if (!(cplab::neighborAlong(pts[i].vertex, marks[i].dir) == u)) continue;
          if (active(pts[i].vertex, t, false, static_cast<int>(i))) {
            result = true;
            break;
          }
        }
      }
    }
    memo[key] = result;
    return result;
  };

  return active(v, 0.0, true, -1);
}

bool connectsDfs(const OccupiedField& field, const std::vector<Vertex>& setA,
                 const std::vector<Vertex>& setB, const std::vector<Vertex>& region) {
  std::vector<Vertex> reg = region;
  std::sort(reg.begin(), reg.end());
  std::unordered_set<Vertex, cplab::VertexHash> targets(setB.begin(), setB.end());
  std::unordered_set<Vertex, cplab::VertexHash> seen;
  std::function<bool(const Vertex&)> visit = [&](const Vertex& u) -> bool {
    if (targets.count(u)) return true;
    seen.insert(u);
    for (const Vertex& nb : cplab::neighbors(u)) {
      if (!cplab::sortedContains(reg, nb) || seen.count(nb) || !field.bitAt(nb)) continue;
      if (visit(nb)) return true;
    }
    return false;
  };
  for (const Vertex& a : setA) {
    if (!cplab::sortedContains(reg, a) || !field.bitAt(a) || seen.count(a)) continue;
    if (visit(a)) return true;
  }
  return false;
}

std::vector<Vertex> clusterMembersDfs(const OccupiedField& field, const std::vector<Vertex>& sources,
                                      const std::vector<Vertex>& region) {
  std::vector<Vertex> reg = region;
  std::sort(reg.begin(), reg.end());
  std::unordered_set<Vertex, cplab::VertexHash> seen;
  std::function<void(const Vertex&)> visit = [&](const Vertex& u) {
    seen.insert(u);
    for (const Vertex& nb : cplab::neighbors(u))
      if (cplab::sortedContains(reg, nb) && !seen.count(nb) && field.bitAt(nb)) visit(nb);
  };
  for (const Vertex& s : sources)
    if (cplab::sortedContains(reg, s) && field.bitAt(s) && !seen.count(s)) visit(s);
  std::vector<Vertex> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

ChiSquare poissonGof(const std::vector<long>& countHistogram, double mean, long samples) {
  // Exact pmf over 0..maxCount, then greedy bin merging until every
  // expected count is at least 5 (tail bin absorbs the remainder).
  const int maxCount = static_cast<int>(countHistogram.size());
  std::vector<double> pmf(static_cast<std::size_t>(maxCount) + 1, 0.0);
  double p = std::exp(-mean);
  double cumulative = 0.0;
  for (int k = 0; k < maxCount; ++k) {
    pmf[static_cast<std::size_t>(k)] = p;
    cumulative += p;
    p *= mean / (k + 1);
  }
  pmf[static_cast<std::size_t>(maxCount)] = 1.0 - cumulative;  // tail >= maxCount

  std::vector<double> expected;
  std::vector<long> observed;
  double accE = 0.0;
  long accO = 0;
  for (int k = 0; k <= maxCount; ++k) {
    accE += pmf[static_cast<std::size_t>(k)] * static_cast<double>(samples);
    accO += k < maxCount ? countHistogram[static_cast<std::size_t>(k)] : 0;
    const bool last = k == maxCount;
    if (accE >= 5.0 || last) {
      expected.push_back(accE);
      observed.push_back(accO);
      accE = 0.0;
      accO = 0;
    }
  }
  if (expected.size() >= 2 && expected.back() < 5.0) {
    expected[expected.size() - 2] += expected.back();
    observed[observed.size() - 2] += observed.back();
    expected.pop_back();
    observed.pop_back();
  }

  ChiSquare result;
  for (std::size_t b = 0; b < expected.size(); ++b) {
    const double diff = static_cast<double>(observed[b]) - expected[b];
    result.statistic += diff * diff / expected[b];
  }
  result.degreesOfFreedom = static_cast<int>(expected.size()) - 1;
  return result;
}

double chiSquareCritical99(int degreesOfFreedom) {
  static const double table[] = {6.635,  9.210,  11.345, 13.277, 15.086, 16.812, 18.475, 20.090,
                                 21.666, 23.209, 24.725, 26.217, 27.688, 29.141, 30.578};
  if (degreesOfFreedom < 1 || degreesOfFreedom > 15)
    throw std::invalid_argument("chiSquareCritical99: df out of tabulated range");
  return table[degreesOfFreedom - 1];
}

}  // namespace oracles
