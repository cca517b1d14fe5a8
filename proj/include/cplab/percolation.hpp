#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cplab/graphical.hpp"
#include "cplab/lattice.hpp"

namespace cplab {

// Percolation observables of the truncated occupancy fields: clusters,
// connection events, theta_n / S_n estimators, cluster-size tails and the
// empirical truncation gap.

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(replicas)
  long replicas = 0;
};

Estimate estimateFromSamples(const std::vector<double>& samples);
Estimate estimateFromCount(long successes, long replicas);

struct DecayFit {
  double amplitude = 0.0;  // exp(intercept) of the log-linear fit
  double rate = 0.0;       // slope
  double rSquared = 0.0;
  int pointsUsed = 0;
  int pointsDropped = 0;  // zero-valued estimates (log undefined)
};

// Least squares of log(y) against x over points with y > 0.
DecayFit fitLogDecay(const std::vector<double>& xs, const std::vector<double>& ys);

// gamma := 1 - alpha*(d-1); positive exactly when alpha < 1/(d-1).
double gammaExponent(int d, double alpha);
void validateAlpha(int d, double alpha);  // throws unless 0 < alpha < 1/(d-1)

enum class ExplorationOrder { Lexicographic, ReverseLexicographic };

struct Cluster {
  std::vector<Vertex> members;        // sorted; empty when no source is occupied
  std::vector<char> touchedTargets;   // parallel to the targetSets argument
};

// Union of occupied components touching the occupied sources, restricted to
// region. Breadth-first, lexicographic queue order by default; the reverse
// order exists to test order independence.
Cluster clusterOf(const OccupiedField& field, const std::vector<Vertex>& sources,
                  const std::vector<Vertex>& region,
                  const std::vector<std::vector<Vertex>>& targetSets = {},
                  ExplorationOrder order = ExplorationOrder::Lexicographic);

// True iff an occupied path inside region joins an occupied vertex of setA
// to an occupied vertex of setB. connects(A, A) is true iff A contains an
// occupied vertex.
bool connects(const OccupiedField& field, const std::vector<Vertex>& setA,
              const std::vector<Vertex>& setB, const std::vector<Vertex>& region);

// The crossing event A = {0 <-> boundary of Lambda_n through sigma^(n)} with
// truncation radius n^alpha. Precomputes the target geometry once so the
// indicator can be re-evaluated cheaply, including after local changes
// (one axis resampled, one mark flipped).
class CrossingEvaluator {
 public:
  CrossingEvaluator(int d, int n, double alpha);

  int d() const { return d_; }
  int n() const { return n_; }
  double truncationRadius() const { return r_; }
  const std::vector<Vertex>& targets() const { return targets_; }        // Lambda_n
  const std::vector<Vertex>& boundary() const { return boundary_; }      // dLambda_n
  const std::vector<Vertex>& windowRegion() const { return windowRegion_; }  // Lambda_{n+n^a}
  SpaceTimeWindow window() const;

  OccupiedField fieldFor(const PointConfiguration& config, const std::vector<Mark>& marks) const;
  bool crossingFromBits(const std::vector<std::uint8_t>& bits) const;
  bool indicator(const PointConfiguration& config, const std::vector<Mark>& marks) const;

  // Target indices whose truncation box contains the given axis.
  const std::vector<int>& targetsNear(const Vertex& axis) const;

  // Indicator after replacing one axis's points (block resampling). Reuses
  // the base field's bits except for targets near the changed axis.
  bool indicatorWithAxisOverride(const PointConfiguration& base, const std::vector<Mark>& baseMarks,
                                 const OccupiedField& baseField, const AxisOverride& ov,
                                 SweepWorkspace& ws, std::vector<std::uint8_t>& bitsScratch) const;

  // Indicator after a mark flip on one point of the base configuration;
  // flippedMarks is the full mark vector with the flip applied.
  bool indicatorWithFlippedMarks(const PointConfiguration& base,
                                 const std::vector<Mark>& flippedMarks,
                                 const OccupiedField& baseField, const Vertex& changedAxis,
                                 SweepWorkspace& ws, std::vector<std::uint8_t>& bitsScratch) const;

 private:
  int d_;
  int n_;
  double alpha_;
  double r_;
  std::vector<Vertex> targets_;
  std::vector<Vertex> boundary_;
  std::vector<Vertex> windowRegion_;
  std::vector<TargetBox> boxes_;                // per target
  std::vector<std::vector<int>> adjacency_;     // target-index graph inside Lambda_n
  std::vector<std::uint8_t> isBoundary_;
  int originIndex_ = -1;
  std::unordered_map<Vertex, std::vector<int>, VertexHash> targetsNearAxis_;
  std::vector<int> emptyTargets_;
};

// theta_n(lambda): probability that 0 connects to the boundary of Lambda_n
// through the truncated field, Monte Carlo over independent replicas.
Estimate estimateTheta(int d, double lambda, int n, double alpha, long replicas,
                       std::uint64_t masterSeed, int workers = 1);

struct ThetaCurve {
  std::vector<double> lambdas;
  std::vector<int> ns;
  std::vector<std::vector<Estimate>> cells;  // [lambda index][n index]
  long lambdaMonotoneViolations = 0;         // per-replica indicator not nondecreasing in lambda
  long nMonotoneViolations = 0;              // per-replica indicator not nonincreasing in n
};

// All lambdas share randomness per replica via the mark coupling; all ns
// share the same configuration, so both monotonicities hold exactly per
// replica and are counted, not assumed.
ThetaCurve estimateThetaCurve(int d, const std::vector<double>& lambdas, const std::vector<int>& ns,
                              double alpha, long replicas, std::uint64_t masterSeed,
                              int workers = 1);

// S_n(lambda) = sum_{k=1..n} theta_k(lambda) on shared randomness; stderr
// from the per-replica sums.
Estimate estimateS(int d, double lambda, int n, double alpha, long replicas,
                   std::uint64_t masterSeed, int workers = 1);

struct TailResult {
  std::vector<int> sizes;
  std::vector<Estimate> tail;  // P(|C| >= size)
  DecayFit fit;                // log P against size
  double edgeTouchFraction = 0.0;
  long monotoneViolations = 0;  // P(|C|>=m) must be nonincreasing per replica set
};

// Cluster-size tail of the cluster of 0 in a fixed box, with an edge-touch
// diagnostic instead of an unverifiable "box large enough" assumption.
// Truncation radius is boxRadius^alpha.
TailResult clusterSizeTail(int d, double lambda, const std::vector<int>& sizes, int boxRadius,
                           double alpha, long replicas, std::uint64_t masterSeed, int workers = 1);

struct GapCurve {
  std::vector<int> ns;
  std::vector<Estimate> gap;  // P(sigma_0^(n) != sigma_0^(ref))
  DecayFit fit;               // log gap against n^alpha
  long monotoneViolations = 0;
  double referenceRadius = 0.0;
};

// Empirical truncation gap: disagreement probability between sigma_0
// truncated at n^alpha and at refMultiplier * max(ns)^alpha, on shared
// randomness, so the disagreement events nest and the curve is per-sample
// nonincreasing.
GapCurve truncationGapCurve(int d, double lambda, const std::vector<int>& ns, double alpha,
                            double refMultiplier, long replicas, std::uint64_t masterSeed,
                            int workers = 1);

}  // namespace cplab
