#include "cplab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>

#include "cplab/parallel.hpp"

namespace cplab {

Estimate estimateFromSamples(const std::vector<double>& samples) {
  Estimate e;
  e.replicas = static_cast<long>(samples.size());
  if (samples.empty()) return e;
  double sum = 0.0;
  for (double x : samples) sum += x;
  e.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    e.se = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return e;
}

Estimate estimateFromCount(long successes, long replicas) {
  Estimate e;
  e.replicas = replicas;
  if (replicas <= 0) return e;
  const double p = static_cast<double>(successes) / static_cast<double>(replicas);
  e.mean = p;
  if (replicas > 1) {
    const double var = p * (1.0 - p) * static_cast<double>(replicas) / static_cast<double>(replicas - 1);
    e.se = std::sqrt(var / static_cast<double>(replicas));
  }
  return e;
}

DecayFit fitLogDecay(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fitLogDecay: size mismatch");
  DecayFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (ys[i] > 0) {
      x.push_back(xs[i]);
      y.push_back(std::log(ys[i]));
    } else {
      ++fit.pointsDropped;
    }
  }
  fit.pointsUsed = static_cast<int>(x.size());
  if (fit.pointsUsed < 2) {
    if (fit.pointsUsed == 1) fit.amplitude = std::exp(y[0]);
    return fit;
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return fit;
  fit.rate = sxy / sxx;
  fit.amplitude = std::exp(my - fit.rate * mx);
  double ssRes = 0, ssTot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = my + fit.rate * (x[i] - mx);
    ssRes += (y[i] - pred) * (y[i] - pred);
    ssTot += (y[i] - my) * (y[i] - my);
  }
  fit.rSquared = ssTot == 0 ? 1.0 : 1.0 - ssRes / ssTot;
  return fit;
}

double gammaExponent(int d, double alpha) { return 1.0 - alpha * (d - 1); }

void validateAlpha(int d, double alpha) {
  if (d < 2) throw std::invalid_argument("validateAlpha: d must be >= 2");
  if (!(alpha > 0.0) || !(alpha < 1.0 / (d - 1)))
    throw std::invalid_argument("validateAlpha: alpha must lie in (0, 1/(d-1))");
}

namespace {

std::vector<Vertex> sortedCopy(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

Cluster clusterOf(const OccupiedField& field, const std::vector<Vertex>& sources,
                  const std::vector<Vertex>& region,
                  const std::vector<std::vector<Vertex>>& targetSets, ExplorationOrder order) {
  const std::vector<Vertex> reg = sortedCopy(region);
  for (const Vertex& s : sources) {
    if (!sortedContains(reg, s)) throw std::invalid_argument("clusterOf: source outside region");
  }
  for (const Vertex& v : reg) {
    if (field.indexOf(v) < 0) throw std::invalid_argument("clusterOf: region outside field");
  }

  std::vector<Vertex> seeds = sortedCopy(sources);
  if (order == ExplorationOrder::ReverseLexicographic) std::reverse(seeds.begin(), seeds.end());

  std::unordered_set<Vertex, VertexHash> visited;
  std::deque<Vertex> queue;
  for (const Vertex& s : seeds) {
    if (field.bitAt(s) && !visited.count(s)) {
      visited.insert(s);
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    std::vector<Vertex> nbs = neighbors(v);
    if (order == ExplorationOrder::ReverseLexicographic) std::reverse(nbs.begin(), nbs.end());
    for (const Vertex& nb : nbs) {
      if (!sortedContains(reg, nb) || visited.count(nb) || !field.bitAt(nb)) continue;
      visited.insert(nb);
      queue.push_back(nb);
    }
  }

  Cluster c;
  c.members.assign(visited.begin(), visited.end());
  std::sort(c.members.begin(), c.members.end());
  c.touchedTargets.reserve(targetSets.size());
  for (const auto& ts : targetSets) {
    bool hit = false;
    for (const Vertex& t : ts) {
      if (visited.count(t)) {
        hit = true;
        break;
      }
    }
    c.touchedTargets.push_back(hit ? 1 : 0);
  }
  return c;
}

bool connects(const OccupiedField& field, const std::vector<Vertex>& setA,
              const std::vector<Vertex>& setB, const std::vector<Vertex>& region) {
  const std::vector<Vertex> reg = sortedCopy(region);
  std::unordered_set<Vertex, VertexHash> targetB;
  for (const Vertex& b : setB)
    if (sortedContains(reg, b)) targetB.insert(b);

  std::unordered_set<Vertex, VertexHash> visited;
  std::deque<Vertex> queue;
  for (const Vertex& a : sortedCopy(setA)) {
    if (!sortedContains(reg, a) || !field.bitAt(a) || visited.count(a)) continue;
    if (targetB.count(a)) return true;
    visited.insert(a);
    queue.push_back(a);
  }
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop_front();
    for (const Vertex& nb : neighbors(v)) {
      if (!sortedContains(reg, nb) || visited.count(nb) || !field.bitAt(nb)) continue;
      if (targetB.count(nb)) return true;
      visited.insert(nb);
      queue.push_back(nb);
    }
  }
  return false;
}

CrossingEvaluator::CrossingEvaluator(int d, int n, double alpha) : d_(d), n_(n), alpha_(alpha) {
  validateAlpha(d, alpha);
  if (n < 1) throw std::invalid_argument("CrossingEvaluator: n must be >= 1");
  r_ = std::pow(static_cast<double>(n), alpha);
  const Vertex zero = origin(d);
  targets_ = ballVertices(zero, n);
  boundary_ = sphereVertices(zero, n);
  windowRegion_ = ballVertices(zero, n + r_);

  boxes_.reserve(targets_.size());
  adjacency_.resize(targets_.size());
  isBoundary_.assign(targets_.size(), 0);
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    boxes_.push_back(makeTargetBox(targets_[i], r_));
    for (const Vertex& nb : neighbors(targets_[i])) {
      const int j = sortedIndexOf(targets_, nb);
      if (j >= 0) adjacency_[i].push_back(j);
    }
    if (graphDistance(zero, targets_[i]) == n) isBoundary_[i] = 1;
  }
  originIndex_ = sortedIndexOf(targets_, zero);

  const int shell = static_cast<int>(std::floor(r_));
  for (const Vertex& axis : windowRegion_) {
    std::vector<int> near;
    for (std::size_t i = 0; i < targets_.size(); ++i)
      if (graphDistance(axis, targets_[i]) <= shell) near.push_back(static_cast<int>(i));
    targetsNearAxis_[axis] = std::move(near);
  }
}

SpaceTimeWindow CrossingEvaluator::window() const {
  return SpaceTimeWindow{windowRegion_, -r_};
}

OccupiedField CrossingEvaluator::fieldFor(const PointConfiguration& config,
                                          const std::vector<Mark>& marks) const {
  OccupiedField field;
  field.region = targets_;
  field.bits.resize(targets_.size());
  field.provenance.truncationRadius = r_;
  SweepWorkspace ws;
  for (std::size_t i = 0; i < targets_.size(); ++i)
    field.bits[i] = sweepOccupied(config, marks, boxes_[i], nullptr, ws) ? 1 : 0;
  return field;
}

bool CrossingEvaluator::crossingFromBits(const std::vector<std::uint8_t>& bits) const {
  if (originIndex_ < 0 || !bits[static_cast<std::size_t>(originIndex_)]) return false;
  // BFS from 0 through occupied targets until a boundary vertex is reached.
  std::vector<std::uint8_t> seen(bits.size(), 0);
  std::deque<int> queue;
  seen[static_cast<std::size_t>(originIndex_)] = 1;
  queue.push_back(originIndex_);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (isBoundary_[static_cast<std::size_t>(v)]) return true;
    for (int nb : adjacency_[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(nb)] || !bits[static_cast<std::size_t>(nb)]) continue;
      seen[static_cast<std::size_t>(nb)] = 1;
      queue.push_back(nb);
    }
  }
  return false;
}

bool CrossingEvaluator::indicator(const PointConfiguration& config,
                                  const std::vector<Mark>& marks) const {
  return crossingFromBits(fieldFor(config, marks).bits);
}

const std::vector<int>& CrossingEvaluator::targetsNear(const Vertex& axis) const {
  auto it = targetsNearAxis_.find(axis);
  return it == targetsNearAxis_.end() ? emptyTargets_ : it->second;
}

bool CrossingEvaluator::indicatorWithAxisOverride(const PointConfiguration& base,
                                                  const std::vector<Mark>& baseMarks,
                                                  const OccupiedField& baseField,
                                                  const AxisOverride& ov, SweepWorkspace& ws,
                                                  std::vector<std::uint8_t>& bitsScratch) const {
  bitsScratch = baseField.bits;
  for (int idx : targetsNear(ov.axis))
    bitsScratch[static_cast<std::size_t>(idx)] =
        sweepOccupied(base, baseMarks, boxes_[static_cast<std::size_t>(idx)], &ov, ws) ? 1 : 0;
  return crossingFromBits(bitsScratch);
}

bool CrossingEvaluator::indicatorWithFlippedMarks(const PointConfiguration& base,
                                                  const std::vector<Mark>& flippedMarks,
                                                  const OccupiedField& baseField,
                                                  const Vertex& changedAxis, SweepWorkspace& ws,
                                                  std::vector<std::uint8_t>& bitsScratch) const {
  bitsScratch = baseField.bits;
  for (int idx : targetsNear(changedAxis))
    bitsScratch[static_cast<std::size_t>(idx)] =
        sweepOccupied(base, flippedMarks, boxes_[static_cast<std::size_t>(idx)], nullptr, ws) ? 1
                                                                                              : 0;
  return crossingFromBits(bitsScratch);
}

Estimate estimateTheta(int d, double lambda, int n, double alpha, long replicas,
                       std::uint64_t masterSeed, int workers) {
  const ThetaCurve curve =
      estimateThetaCurve(d, {lambda}, {n}, alpha, replicas, masterSeed, workers);
  return curve.cells[0][0];
}

ThetaCurve estimateThetaCurve(int d, const std::vector<double>& lambdas, const std::vector<int>& ns,
                              double alpha, long replicas, std::uint64_t masterSeed, int workers) {
  validateAlpha(d, alpha);
  if (lambdas.empty() || ns.empty()) throw std::invalid_argument("estimateThetaCurve: empty grid");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] <= 0) throw std::invalid_argument("estimateThetaCurve: lambda must be positive");
    if (i > 0 && lambdas[i] <= lambdas[i - 1])
      throw std::invalid_argument("estimateThetaCurve: lambdas must be strictly increasing");
  }
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] < 1) throw std::invalid_argument("estimateThetaCurve: n must be >= 1");
    if (i > 0 && ns[i] <= ns[i - 1])
      throw std::invalid_argument("estimateThetaCurve: ns must be strictly increasing");
  }
  if (replicas < 1) throw std::invalid_argument("estimateThetaCurve: replicas must be positive");

  std::vector<CrossingEvaluator> evals;
  evals.reserve(ns.size());
  for (int n : ns) evals.emplace_back(d, n, alpha);
  const SpaceTimeWindow window = evals.back().window();

  const std::size_t L = lambdas.size(), N = ns.size();
  std::vector<std::vector<std::uint8_t>> indicators(static_cast<std::size_t>(replicas));

  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    std::vector<std::uint8_t> row(L * N);
    for (std::size_t li = 0; li < L; ++li) {
      const auto marks = marksFor(config, lambdas[li]);
      for (std::size_t ni = 0; ni < N; ++ni)
        row[li * N + ni] = evals[ni].indicator(config, marks) ? 1 : 0;
    }
    indicators[static_cast<std::size_t>(i)] = std::move(row);
  });

  ThetaCurve curve;
  curve.lambdas = lambdas;
  curve.ns = ns;
  std::vector<long> counts(L * N, 0);
  for (const auto& row : indicators) {
    for (std::size_t li = 0; li < L; ++li) {
      for (std::size_t ni = 0; ni < N; ++ni) {
        counts[li * N + ni] += row[li * N + ni];
        if (ni > 0 && row[li * N + ni] > row[li * N + ni - 1]) ++curve.nMonotoneViolations;
        if (li > 0 && row[li * N + ni] < row[(li - 1) * N + ni]) ++curve.lambdaMonotoneViolations;
      }
    }
  }
  curve.cells.resize(L);
  for (std::size_t li = 0; li < L; ++li) {
    curve.cells[li].resize(N);
    for (std::size_t ni = 0; ni < N; ++ni)
      curve.cells[li][ni] = estimateFromCount(counts[li * N + ni], replicas);
  }
  return curve;
}

Estimate estimateS(int d, double lambda, int n, double alpha, long replicas,
                   std::uint64_t masterSeed, int workers) {
  validateAlpha(d, alpha);
  if (n < 1) throw std::invalid_argument("estimateS: n must be >= 1");
  if (replicas < 1) throw std::invalid_argument("estimateS: replicas must be positive");
  std::vector<CrossingEvaluator> evals;
  evals.reserve(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) evals.emplace_back(d, k, alpha);
  const SpaceTimeWindow window = evals.back().window();

  std::vector<double> sums(static_cast<std::size_t>(replicas), 0.0);
  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    double s = 0.0;
    for (const auto& ev : evals) s += ev.indicator(config, marks) ? 1.0 : 0.0;
    sums[static_cast<std::size_t>(i)] = s;
  });
  return estimateFromSamples(sums);
}

TailResult clusterSizeTail(int d, double lambda, const std::vector<int>& sizes, int boxRadius,
                           double alpha, long replicas, std::uint64_t masterSeed, int workers) {
  validateAlpha(d, alpha);
  if (sizes.empty()) throw std::invalid_argument("clusterSizeTail: empty size list");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("clusterSizeTail: sizes must ascend");
  if (boxRadius < 1) throw std::invalid_argument("clusterSizeTail: boxRadius must be >= 1");
  if (replicas < 1) throw std::invalid_argument("clusterSizeTail: replicas must be positive");

  const Vertex zero = origin(d);
  const double r = std::pow(static_cast<double>(boxRadius), alpha);
  const std::vector<Vertex> region = ballVertices(zero, boxRadius);
  const std::vector<Vertex> edge = sphereVertices(zero, boxRadius);
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

  struct Rep {
    long clusterSize = 0;
    bool edgeTouch = false;
  };
  std::vector<Rep> reps(static_cast<std::size_t>(replicas));

  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    SweepWorkspace ws;
    std::vector<std::uint8_t> bits(region.size());
    for (std::size_t t = 0; t < region.size(); ++t)
      bits[t] = sweepOccupied(config, marks, boxes[t], nullptr, ws) ? 1 : 0;

    Rep rep;
    if (bits[static_cast<std::size_t>(originIdx)]) {
      std::vector<std::uint8_t> seen(region.size(), 0);
      std::deque<int> queue;
      seen[static_cast<std::size_t>(originIdx)] = 1;
      queue.push_back(originIdx);
      long size = 0;
      while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        ++size;
        if (isEdge[static_cast<std::size_t>(v)]) rep.edgeTouch = true;
        for (int nb : adjacency[static_cast<std::size_t>(v)]) {
          if (seen[static_cast<std::size_t>(nb)] || !bits[static_cast<std::size_t>(nb)]) continue;
          seen[static_cast<std::size_t>(nb)] = 1;
          queue.push_back(nb);
        }
      }
      rep.clusterSize = size;
    }
    reps[static_cast<std::size_t>(i)] = rep;
  });

  TailResult result;
  result.sizes = sizes;
  long edgeCount = 0;
  std::vector<long> counts(sizes.size(), 0);
  for (const Rep& rep : reps) {
    if (rep.edgeTouch) ++edgeCount;
    for (std::size_t s = 0; s < sizes.size(); ++s)
      if (rep.clusterSize >= sizes[s]) ++counts[s];
  }
  result.tail.reserve(sizes.size());
  std::vector<double> xs, means;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    result.tail.push_back(estimateFromCount(counts[s], replicas));
    xs.push_back(static_cast<double>(sizes[s]));
    means.push_back(result.tail.back().mean);
    if (s > 0 && counts[s] > counts[s - 1]) ++result.monotoneViolations;
  }
  result.fit = fitLogDecay(xs, means);
  result.edgeTouchFraction = static_cast<double>(edgeCount) / static_cast<double>(replicas);
  return result;
}

GapCurve truncationGapCurve(int d, double lambda, const std::vector<int>& ns, double alpha,
                            double refMultiplier, long replicas, std::uint64_t masterSeed,
                            int workers) {
  validateAlpha(d, alpha);
  if (ns.empty()) throw std::invalid_argument("truncationGapCurve: empty n list");
  for (std::size_t i = 1; i < ns.size(); ++i)
    if (ns[i] <= ns[i - 1]) throw std::invalid_argument("truncationGapCurve: ns must ascend");
  if (!(refMultiplier > 1.0))
    throw std::invalid_argument("truncationGapCurve: reference radius not larger than tested radii");
  if (replicas < 1) throw std::invalid_argument("truncationGapCurve: replicas must be positive");

  const Vertex zero = origin(d);
  std::vector<double> radii;
  radii.reserve(ns.size());
  for (int n : ns) radii.push_back(std::pow(static_cast<double>(n), alpha));
  const double refRadius = refMultiplier * radii.back();

  std::vector<TargetBox> boxes;
  boxes.reserve(radii.size());
  for (double r : radii) boxes.push_back(makeTargetBox(zero, r));
  const TargetBox refBox = makeTargetBox(zero, refRadius);
  const SpaceTimeWindow window = makeWindow(ballVertices(zero, refRadius), -refRadius);

  std::vector<std::vector<std::uint8_t>> gaps(static_cast<std::size_t>(replicas));
  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    SweepWorkspace ws;
    const bool refBit = sweepOccupied(config, marks, refBox, nullptr, ws);
    std::vector<std::uint8_t> row(radii.size());
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const bool bit = sweepOccupied(config, marks, boxes[k], nullptr, ws);
      row[k] = (bit != refBit) ? 1 : 0;
    }
    gaps[static_cast<std::size_t>(i)] = std::move(row);
  });

  GapCurve curve;
  curve.ns = ns;
  curve.referenceRadius = refRadius;
  std::vector<long> counts(ns.size(), 0);
  for (const auto& row : gaps) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      counts[k] += row[k];
      if (k > 0 && row[k] > row[k - 1]) ++curve.monotoneViolations;
    }
  }
  std::vector<double> xs, means;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    curve.gap.push_back(estimateFromCount(counts[k], replicas));
    xs.push_back(radii[k]);
    means.push_back(curve.gap.back().mean);
  }
  curve.fit = fitLogDecay(xs, means);
  return curve;
}

}  // namespace cplab
