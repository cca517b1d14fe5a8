#include "cplab/osss.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "cplab/parallel.hpp"

namespace cplab {

namespace {

Vertex addOffset(const Vertex& v, const Vertex& off) {
  Vertex r = v;
  for (int i = 0; i < v.dim(); ++i) r[i] = v[i] + off[i];
  return r;
}

void validateWindowForTree(const PointConfiguration& config, int n, double r) {
  const SpaceTimeWindow& w = config.window();
  if (w.timeFloor > -r)
    throw std::invalid_argument("decision tree: window time range shorter than n^alpha");
  for (const Vertex& v : ballVertices(origin(config.dim()), n + r))
    if (!sortedContains(w.region, v))
      throw std::invalid_argument("decision tree: window region does not cover Lambda_{n+n^alpha}");
}

// Union-find over Lambda_n indices carrying the two halting flags.
struct ExploredComponents {
  std::vector<int> parent;
  std::vector<std::uint8_t> hasZero;
  std::vector<std::uint8_t> hasBoundary;

  explicit ExploredComponents(const std::vector<std::uint8_t>& isBoundary, int originIdx) {
    const int n = static_cast<int>(isBoundary.size());
    parent.resize(static_cast<std::size_t>(n));
    hasZero.assign(static_cast<std::size_t>(n), 0);
    hasBoundary = isBoundary;
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    if (originIdx >= 0) hasZero[static_cast<std::size_t>(originIdx)] = 1;
  }

  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }

  void unite(int a, int b) {
    const int ra = find(a), rb = find(b);
    if (ra == rb) return;
    parent[static_cast<std::size_t>(ra)] = rb;
    hasZero[static_cast<std::size_t>(rb)] |= hasZero[static_cast<std::size_t>(ra)];
    hasBoundary[static_cast<std::size_t>(rb)] |= hasBoundary[static_cast<std::size_t>(ra)];
  }

  bool crossingAt(int x) {
    const int r = find(x);
    return hasZero[static_cast<std::size_t>(r)] && hasBoundary[static_cast<std::size_t>(r)];
  }
};

struct PatchedAxis {
  std::vector<SpaceTimePoint> pts;
  std::vector<Mark> marks;
  bool identical = false;  // resample changed nothing (empty block stayed empty)
};

PatchedAxis buildPatchedAxis(const PointConfiguration& config, const Vertex& axis, double lo,
                             double hi, double starThr, RandomStream& stream) {
  PatchedAxis out;
  const std::vector<int>* idx = config.axisPoints(axis);
  bool hadPointInBlock = false;
  if (idx) {
    for (int i : *idx) {
      const SpaceTimePoint& p = config.points()[static_cast<std::size_t>(i)];
      if (p.time > lo && p.time <= hi) {
        hadPointInBlock = true;
      } else if (p.time <= lo) {
        out.pts.push_back(p);
      }
    }
  }
  const auto fresh = poissonPointsOnAxis(axis, lo, hi, stream);
  out.pts.insert(out.pts.end(), fresh.begin(), fresh.end());
  if (idx) {
    for (int i : *idx) {
      const SpaceTimePoint& p = config.points()[static_cast<std::size_t>(i)];
      if (p.time > hi) out.pts.push_back(p);
    }
  }
  out.identical = !hadPointInBlock && fresh.empty();
  out.marks.resize(out.pts.size());
  for (std::size_t j = 0; j < out.pts.size(); ++j) {
    out.marks[j].isStar = out.pts[j].u <= starThr;
    out.marks[j].dir = out.pts[j].dir;
  }
  return out;
}

}  // namespace

bool BlockPartition::contains(const BlockIndex& b) const {
  return b.slot >= 0 && b.slot < slotsPerAxis && sortedContains(axes, b.vertex);
}

std::pair<double, double> BlockPartition::timeInterval(const BlockIndex& b) const {
  const double hi = -epsilon * b.slot;
  // the last slot ends exactly at the window floor so the blocks tile
  // (-n^alpha, 0] without rounding gaps
  const double lo = (b.slot + 1 == slotsPerAxis) ? -truncationRadius : hi - epsilon;
  return {lo, hi};
}

BlockPartition partitionBlocks(int d, int n, double alpha, double epsilon) {
  validateAlpha(d, alpha);
  if (n < 1) throw std::invalid_argument("partitionBlocks: n must be >= 1");
  const double r = std::pow(static_cast<double>(n), alpha);
  if (!(epsilon > 0) || epsilon > r)
    throw std::invalid_argument("partitionBlocks: epsilon must lie in (0, n^alpha]");
  const double ratio = r / epsilon;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("partitionBlocks: n^alpha / epsilon must be an integer");
  BlockPartition p;
  p.d = d;
  p.n = n;
  p.alpha = alpha;
  p.epsilon = epsilon;
  p.slotsPerAxis = static_cast<int>(rounded);
  p.truncationRadius = r;
  p.axes = ballVertices(origin(d), n + r);
  return p;
}

DetermineResult determine(const Vertex& v, const PointConfiguration& config, double lambda, int n,
                          double alpha) {
  validateAlpha(v.dim(), alpha);
  const double r = std::pow(static_cast<double>(n), alpha);
  const SpaceTimeWindow& w = config.window();
  if (w.timeFloor > -r)
    throw std::invalid_argument("determine: window time range shorter than n^alpha");
  for (const Vertex& b : ballVertices(v, r))
    if (!sortedContains(w.region, b))
      throw std::invalid_argument("determine: window region does not cover ball(v, n^alpha)");

  DetermineResult res;
  SweepWorkspace ws;
  res.bit = sweepOccupied(config, marksFor(config, lambda), makeTargetBox(v, r), nullptr, ws);
  const std::vector<Vertex> partitionRegion = ballVertices(origin(v.dim()), n + r);
  for (const Vertex& b : ballVertices(v, r))
    if (sortedContains(partitionRegion, b)) res.revealedAxes.push_back(b);
  return res;
}

DecisionTreeTrace runDecisionTree(int k, const PointConfiguration& config, double lambda, int n,
                                  double alpha) {
  const int d = config.dim();
  validateAlpha(d, alpha);
  if (k < 1 || k > n) throw std::invalid_argument("runDecisionTree: k out of range");
  const double r = std::pow(static_cast<double>(n), alpha);
  validateWindowForTree(config, n, r);

  const Vertex zero = origin(d);
  const std::vector<Vertex> targets = ballVertices(zero, n);  // Lambda_n
  const std::vector<Vertex> windowRegion = ballVertices(zero, n + r);
  const std::vector<Vertex> ballOffsets = ballVertices(zero, r);
  const int originIdx = sortedIndexOf(targets, zero);

  std::vector<std::vector<int>> adjacency(targets.size());
  std::vector<std::uint8_t> isBoundary(targets.size(), 0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (const Vertex& nb : neighbors(targets[i])) {
      const int j = sortedIndexOf(targets, nb);
      if (j >= 0) adjacency[i].push_back(j);
    }
    if (graphDistance(zero, targets[i]) == n) isBoundary[i] = 1;
  }

  const auto marks = marksFor(config, lambda);
  std::vector<std::int8_t> determined(targets.size(), -1);
  std::vector<std::uint8_t> enqueued(targets.size(), 0);
  std::vector<std::uint8_t> revealed(windowRegion.size(), 0);
  long revealedCount = 0;
  ExploredComponents comps(isBoundary, originIdx);
  SweepWorkspace ws;

  DecisionTreeTrace trace;
  trace.k = k;

  std::deque<int> queue;
  for (const Vertex& s : sphereVertices(zero, k)) {
    const int i = sortedIndexOf(targets, s);
    enqueued[static_cast<std::size_t>(i)] = 1;
    queue.push_back(i);
  }

  auto finalize = [&](bool outcome, HaltReason reason) {
    trace.outcome = outcome;
    trace.haltReason = reason;
    for (std::size_t i = 0; i < windowRegion.size(); ++i)
      if (revealed[i]) trace.revealedAxes.push_back(windowRegion[i]);
    return trace;
  };

  while (!queue.empty()) {
    const int vi = queue.front();
    queue.pop_front();
    if (determined[static_cast<std::size_t>(vi)] != -1) continue;
    const Vertex& v = targets[static_cast<std::size_t>(vi)];

    const bool bit = sweepOccupied(config, marks, makeTargetBox(v, r), nullptr, ws);
    determined[static_cast<std::size_t>(vi)] = bit ? 1 : 0;
    trace.determinedVertices.push_back(v);
    for (const Vertex& off : ballOffsets) {
      const int wi = sortedIndexOf(windowRegion, addOffset(v, off));
      if (wi >= 0 && !revealed[static_cast<std::size_t>(wi)]) {
        revealed[static_cast<std::size_t>(wi)] = 1;
        ++revealedCount;
      }
    }
    trace.cumulativeRevealedAxisCounts.push_back(revealedCount);

    if (!bit) continue;
    for (int j : adjacency[static_cast<std::size_t>(vi)])
      if (determined[static_cast<std::size_t>(j)] == 1) comps.unite(vi, j);
    if (comps.crossingAt(vi)) return finalize(true, HaltReason::FoundCrossing);
    for (int j : adjacency[static_cast<std::size_t>(vi)]) {
      if (determined[static_cast<std::size_t>(j)] == -1 && !enqueued[static_cast<std::size_t>(j)]) {
        enqueued[static_cast<std::size_t>(j)] = 1;
        queue.push_back(j);
      }
    }
  }
  return finalize(false, HaltReason::ClusterExhausted);
}

bool crossingIndicator(const PointConfiguration& config, double lambda, int n, double alpha) {
  const CrossingEvaluator eval(config.dim(), n, alpha);
  return eval.indicator(config, marksFor(config, lambda));
}

std::string dumpTrace(const DecisionTreeTrace& trace, int slotsPerAxis) {
  std::string out;
  for (std::size_t i = 0; i < trace.determinedVertices.size(); ++i) {
    out += trace.determinedVertices[i].str();
    out += " ";
    out += std::to_string(trace.cumulativeRevealedAxisCounts[i] * slotsPerAxis);
    out += "\n";
  }
  return out;
}

Estimate estimateRevealment(int d, int k, const Vertex& axis, double lambda, int n, double alpha,
                            long replicas, std::uint64_t masterSeed, int workers) {
  const RevealmentTable table =
      estimateRevealmentTable(d, k, lambda, n, alpha, replicas, masterSeed, workers);
  const int i = sortedIndexOf(table.axes, axis);
  if (i < 0) return estimateFromCount(0, replicas);
  return table.revealment[static_cast<std::size_t>(i)];
}

Estimate estimateRevealment(int d, int k, const BlockIndex& block, double lambda, int n,
                            double alpha, long replicas, std::uint64_t masterSeed, int workers) {
  return estimateRevealment(d, k, block.vertex, lambda, n, alpha, replicas, masterSeed, workers);
}

namespace {

// Per-replica revealment bitmaps; shared by the table estimator and osssCheck.
std::vector<std::vector<std::uint8_t>> revealmentMatrix(int d, int k, double lambda, int n,
                                                        double alpha,
                                                        const std::vector<Vertex>& axes,
                                                        long replicas, std::uint64_t masterSeed,
                                                        int workers) {
  const double r = std::pow(static_cast<double>(n), alpha);
  const SpaceTimeWindow window = makeWindow(ballVertices(origin(d), n + r), -r);
  std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(replicas));
  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const DecisionTreeTrace trace = runDecisionTree(k, config, lambda, n, alpha);
    std::vector<std::uint8_t> row(axes.size(), 0);
    for (const Vertex& v : trace.revealedAxes) {
      const int a = sortedIndexOf(axes, v);
      if (a >= 0) row[static_cast<std::size_t>(a)] = 1;
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  });
  return rows;
}

}  // namespace

RevealmentTable estimateRevealmentTable(int d, int k, double lambda, int n, double alpha,
                                        long replicas, std::uint64_t masterSeed, int workers) {
  if (replicas < 1) throw std::invalid_argument("estimateRevealment: replicas must be positive");
  if (k < 1 || k > n) throw std::invalid_argument("estimateRevealment: k out of range");
  RevealmentTable table;
  const double r = std::pow(static_cast<double>(n), alpha);
  table.axes = ballVertices(origin(d), n + r);
  const auto rows = revealmentMatrix(d, k, lambda, n, alpha, table.axes, replicas, masterSeed, workers);
  std::vector<long> counts(table.axes.size(), 0);
  for (const auto& row : rows)
    for (std::size_t a = 0; a < row.size(); ++a) counts[a] += row[a];
  table.revealment.reserve(counts.size());
  for (long c : counts) table.revealment.push_back(estimateFromCount(c, replicas));
  return table;
}

PointConfiguration resampleBlock(const PointConfiguration& config, const BlockPartition& partition,
                                 const BlockIndex& block, RandomStream& stream) {
  if (!partition.contains(block)) throw std::invalid_argument("resampleBlock: block not in partition");
  const auto [lo, hi] = partition.timeInterval(block);
  std::vector<SpaceTimePoint> pts;
  pts.reserve(config.points().size() + 2);
  for (const SpaceTimePoint& p : config.points()) {
    const bool inBlock = p.vertex == block.vertex && p.time > lo && p.time <= hi;
    if (!inBlock) pts.push_back(p);
  }
  const auto fresh = poissonPointsOnAxis(block.vertex, lo, hi, stream);
  pts.insert(pts.end(), fresh.begin(), fresh.end());
  return PointConfiguration(config.window(), std::move(pts));
}

Estimate estimateInfluence(const BlockPartition& partition, const BlockIndex& block, double lambda,
                           long replicas, std::uint64_t masterSeed, int workers) {
  if (!partition.contains(block))
    throw std::invalid_argument("estimateInfluence: block outside the event window");
  if (replicas < 1) throw std::invalid_argument("estimateInfluence: replicas must be positive");
  const CrossingEvaluator eval(partition.d, partition.n, partition.alpha);
  const SpaceTimeWindow window = eval.window();
  const auto [lo, hi] = partition.timeInterval(block);
  const double thr = starThreshold(lambda, partition.d);

  std::vector<std::uint8_t> diffs(static_cast<std::size_t>(replicas), 0);
  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);
    const auto marks = marksFor(config, lambda);
    const OccupiedField field = eval.fieldFor(config, marks);
    const bool base = eval.crossingFromBits(field.bits);
    const PatchedAxis patch = buildPatchedAxis(config, block.vertex, lo, hi, thr, stream);
    if (patch.identical) return;
    SweepWorkspace ws;
    std::vector<std::uint8_t> scratch;
    AxisOverride ov{block.vertex, &patch.pts, &patch.marks};
    const bool mod = eval.indicatorWithAxisOverride(config, marks, field, ov, ws, scratch);
    diffs[static_cast<std::size_t>(i)] = (mod != base) ? 1 : 0;
  });
  long count = 0;
  for (auto v : diffs) count += v;
  return estimateFromCount(count, replicas);
}

PivotalReport pivotalPoints(const PointConfiguration& config, double lambda, int n, double alpha) {
  const CrossingEvaluator eval(config.dim(), n, alpha);
  auto marks = marksFor(config, lambda);
  const OccupiedField field = eval.fieldFor(config, marks);
  const bool base = eval.crossingFromBits(field.bits);

  PivotalReport report;
  report.configSize = static_cast<int>(config.points().size());
  SweepWorkspace ws;
  std::vector<std::uint8_t> scratch;
  for (int i = 0; i < report.configSize; ++i) {
    marks[static_cast<std::size_t>(i)].isStar = !marks[static_cast<std::size_t>(i)].isStar;
    const bool flipped = eval.indicatorWithFlippedMarks(
        config, marks, field, config.points()[static_cast<std::size_t>(i)].vertex, ws, scratch);
    marks[static_cast<std::size_t>(i)].isStar = !marks[static_cast<std::size_t>(i)].isStar;
    if (flipped != base) report.pivotalPointIds.push_back(i);
  }
  return report;
}

double russoConstant(double lambda, int d) {
  const double denom = 2.0 * d * lambda + 1.0;
  return 2.0 * d / (denom * denom);
}

RussoCheckResult russoCheck(int d, double lambda, double h, int n, double alpha, long replicas,
                            std::uint64_t masterSeed, int workers) {
  if (!(h > 0) || !(lambda - h > 0))
    throw std::invalid_argument("russoCheck: need 0 < h < lambda");
  if (replicas < 1) throw std::invalid_argument("russoCheck: replicas must be positive");
  const CrossingEvaluator eval(d, n, alpha);
  const SpaceTimeWindow window = eval.window();
  const double c = russoConstant(lambda, d);

  std::vector<double> fdSamples(static_cast<std::size_t>(replicas));
  std::vector<double> pivSamples(static_cast<std::size_t>(replicas));
  std::vector<std::uint8_t> violations(static_cast<std::size_t>(replicas), 0);

  parallelFor(replicas, workers, [&](long i) {
    RandomStream stream(seedFor(masterSeed, static_cast<std::uint64_t>(i)));
    const PointConfiguration config = samplePoints(window, stream);

    const bool indMinus = eval.indicator(config, marksFor(config, lambda - h));
    const bool indPlus = eval.indicator(config, marksFor(config, lambda + h));
    fdSamples[static_cast<std::size_t>(i)] =
        (static_cast<double>(indPlus) - static_cast<double>(indMinus)) / (2.0 * h);
    if (indPlus < indMinus) violations[static_cast<std::size_t>(i)] = 1;

    auto marks = marksFor(config, lambda);
    const OccupiedField field = eval.fieldFor(config, marks);
    const bool base = eval.crossingFromBits(field.bits);
    SweepWorkspace ws;
    std::vector<std::uint8_t> scratch;
    long piv = 0;
    for (std::size_t j = 0; j < marks.size(); ++j) {
      marks[j].isStar = !marks[j].isStar;
      const bool flipped =
          eval.indicatorWithFlippedMarks(config, marks, field, config.points()[j].vertex, ws, scratch);
      marks[j].isStar = !marks[j].isStar;
      if (flipped != base) ++piv;
    }
    pivSamples[static_cast<std::size_t>(i)] = c * static_cast<double>(piv);
  });

  RussoCheckResult res;
  res.finiteDifference = estimateFromSamples(fdSamples);
  res.pivotalForm = estimateFromSamples(pivSamples);
  res.cLambda = c;
  for (auto v : violations) res.couplingViolations += v;
  return res;
}

OsssCheckResult osssCheck(int d, double lambda, int k, int n, double alpha, double epsilon,
                          long replicas, std::uint64_t masterSeed, int workers) {
  const BlockPartition partition = partitionBlocks(d, n, alpha, epsilon);
  if (k < 1 || k > n) throw std::invalid_argument("osssCheck: k out of range");
  if (replicas < 1) throw std::invalid_argument("osssCheck: replicas must be positive");
  const CrossingEvaluator eval(d, n, alpha);
  const SpaceTimeWindow window = eval.window();
  const double thr = starThreshold(lambda, d);
  const std::size_t A = partition.axes.size();

  OsssCheckResult result;
  result.axes = partition.axes;
  result.blockCount = partition.blockCount();

  // theta pool
  {
    const std::uint64_t poolSeed = substream(masterSeed, 1);
    std::vector<std::uint8_t> inds(static_cast<std::size_t>(replicas), 0);
    parallelFor(replicas, workers, [&](long i) {
      RandomStream stream(seedFor(poolSeed, static_cast<std::uint64_t>(i)));
      const PointConfiguration config = samplePoints(window, stream);
      inds[static_cast<std::size_t>(i)] = eval.indicator(config, marksFor(config, lambda)) ? 1 : 0;
    });
    long count = 0;
    for (auto v : inds) count += v;
    result.theta = estimateFromCount(count, replicas);
    const double t = result.theta.mean;
    result.lhs.mean = t * (1.0 - t);
    // delta method plus a second-order cushion
    result.lhs.se = std::abs(1.0 - 2.0 * t) * result.theta.se + result.theta.se * result.theta.se;
    result.lhs.replicas = replicas;
  }

  // revealment pool
  const auto revealRows =
      revealmentMatrix(d, k, lambda, n, alpha, partition.axes, replicas, substream(masterSeed, 2), workers);
  std::vector<double> revealMean(A, 0.0);
  for (const auto& row : revealRows)
    for (std::size_t a = 0; a < A; ++a) revealMean[a] += row[a];
  for (std::size_t a = 0; a < A; ++a) revealMean[a] /= static_cast<double>(replicas);

  // influence pool: per replica, the indicator difference is evaluated for
  // every block of every axis on one shared base configuration.
  std::vector<std::vector<std::uint8_t>> diffRows(static_cast<std::size_t>(replicas));
  {
    const std::uint64_t poolSeed = substream(masterSeed, 3);
    parallelFor(replicas, workers, [&](long i) {
      RandomStream stream(seedFor(poolSeed, static_cast<std::uint64_t>(i)));
      const PointConfiguration config = samplePoints(window, stream);
      const auto marks = marksFor(config, lambda);
      const OccupiedField field = eval.fieldFor(config, marks);
      const bool base = eval.crossingFromBits(field.bits);
      SweepWorkspace ws;
      std::vector<std::uint8_t> scratch;
      std::vector<std::uint8_t> row(A, 0);
      for (std::size_t a = 0; a < A; ++a) {
        const Vertex& axis = partition.axes[a];
        for (int slot = 0; slot < partition.slotsPerAxis; ++slot) {
          const auto [lo, hi] = partition.timeInterval(BlockIndex{axis, slot});
          const PatchedAxis patch = buildPatchedAxis(config, axis, lo, hi, thr, stream);
          if (patch.identical) continue;
          AxisOverride ov{axis, &patch.pts, &patch.marks};
          const bool mod = eval.indicatorWithAxisOverride(config, marks, field, ov, ws, scratch);
          if (mod != base) ++row[a];
        }
      }
      diffRows[static_cast<std::size_t>(i)] = std::move(row);
    });
  }
  std::vector<double> influenceMean(A, 0.0);
  for (const auto& row : diffRows)
    for (std::size_t a = 0; a < A; ++a) influenceMean[a] += row[a];
  for (std::size_t a = 0; a < A; ++a) influenceMean[a] /= static_cast<double>(replicas);

  result.revealmentPerAxis = revealMean;
  result.influencePerAxis = influenceMean;

  double rhs = 0.0;
  for (std::size_t a = 0; a < A; ++a) rhs += revealMean[a] * influenceMean[a];

  // rhs variance: fluctuations of the revealment-weighted influence sums,
  // one term per independent pool.
  std::vector<double> ySamples(revealRows.size());
  for (std::size_t t = 0; t < revealRows.size(); ++t) {
    double y = 0.0;
    for (std::size_t a = 0; a < A; ++a)
      if (revealRows[t][a]) y += influenceMean[a];
    ySamples[t] = y;
  }
  std::vector<double> zSamples(diffRows.size());
  for (std::size_t rIdx = 0; rIdx < diffRows.size(); ++rIdx) {
    double z = 0.0;
    for (std::size_t a = 0; a < A; ++a) z += revealMean[a] * diffRows[rIdx][a];
    zSamples[rIdx] = z;
  }
  const Estimate yEst = estimateFromSamples(ySamples);
  const Estimate zEst = estimateFromSamples(zSamples);
  result.rhs.mean = rhs;
  result.rhs.se = std::sqrt(yEst.se * yEst.se + zEst.se * zEst.se);
  result.rhs.replicas = replicas;
  return result;
}

}  // namespace cplab
