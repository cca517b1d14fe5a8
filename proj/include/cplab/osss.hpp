#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cplab/percolation.hpp"

namespace cplab {

// Space-time block discretization, the cluster-exploration decision tree T_k
// with Determine(v), revealment and influence estimators, pivotal points,
// the Russo-type derivative and the empirical OSSS inequality check, all for
// the crossing event A = {0 <-> dLambda_n through sigma^(n) inside Lambda_n}.

struct BlockIndex {
  Vertex vertex;
  int slot = 0;  // block covers times (-(slot+1)*eps, -slot*eps]

  bool operator==(const BlockIndex& o) const { return vertex == o.vertex && slot == o.slot; }
};

struct BlockPartition {
  int d = 2;
  int n = 1;
  double alpha = 0.5;
  double epsilon = 0.0;
  int slotsPerAxis = 0;            // n^alpha / epsilon, validated integral
  double truncationRadius = 0.0;   // n^alpha
  std::vector<Vertex> axes;        // Lambda_{n + n^alpha}, lex-sorted

  long blockCount() const { return static_cast<long>(axes.size()) * slotsPerAxis; }
  bool contains(const BlockIndex& b) const;
  // (lo, hi] time interval of a block.
  std::pair<double, double> timeInterval(const BlockIndex& b) const;
};

// Blocks tile Lambda_{n+n^alpha} x (-n^alpha, 0] exactly; throws when
// n^alpha / epsilon is not an integer.
BlockPartition partitionBlocks(int d, int n, double alpha, double epsilon);

struct DetermineResult {
  bool bit = false;                  // sigma_v^(n)
  std::vector<Vertex> revealedAxes;  // ball(v, n^alpha) clipped to the partition region
};

// Reveals every block within distance n^alpha of v and returns the truncated
// occupancy bit those blocks determine.
DetermineResult determine(const Vertex& v, const PointConfiguration& config, double lambda, int n,
                          double alpha);

enum class HaltReason { FoundCrossing, ClusterExhausted };

struct DecisionTreeTrace {
  int k = 0;
  std::vector<Vertex> determinedVertices;          // in call order
  std::vector<long> cumulativeRevealedAxisCounts;  // parallel to determinedVertices
  std::vector<Vertex> revealedAxes;                // sorted
  bool outcome = false;
  HaltReason haltReason = HaltReason::ClusterExhausted;

  long revealedBlockCount(int slotsPerAxis) const {
    return static_cast<long>(revealedAxes.size()) * slotsPerAxis;
  }
};

// T_k: Determine every vertex of dLambda_k (lexicographic), then undetermined
// Lambda_n-neighbours of occupied determined vertices in FIFO order; halts as
// soon as an explored occupied component contains 0 and touches dLambda_n, or
// when no frontier remains. The outcome always equals the full-reveal
// indicator of A.
DecisionTreeTrace runDecisionTree(int k, const PointConfiguration& config, double lambda, int n,
                                  double alpha);

// Full-reveal indicator of A (reveal everything, then connectivity).
bool crossingIndicator(const PointConfiguration& config, double lambda, int n, double alpha);

// One determined vertex per line with the cumulative revealed-block count.
std::string dumpTrace(const DecisionTreeTrace& trace, int slotsPerAxis);

// Fraction of replicas whose T_k trace revealed the axis; every slot of one
// vertex shares this value because Determine reveals whole axes.
Estimate estimateRevealment(int d, int k, const Vertex& axis, double lambda, int n, double alpha,
                            long replicas, std::uint64_t masterSeed, int workers = 1);
Estimate estimateRevealment(int d, int k, const BlockIndex& block, double lambda, int n,
                            double alpha, long replicas, std::uint64_t masterSeed, int workers = 1);

// Per-axis revealment probabilities, one decision-tree run per replica.
struct RevealmentTable {
  std::vector<Vertex> axes;
  std::vector<Estimate> revealment;
};
RevealmentTable estimateRevealmentTable(int d, int k, double lambda, int n, double alpha,
                                        long replicas, std::uint64_t masterSeed, int workers = 1);

// Deletes the points inside one block and replaces them by a fresh rate-1
// Poisson draw with fresh labels; all other points unchanged.
PointConfiguration resampleBlock(const PointConfiguration& config, const BlockPartition& partition,
                                 const BlockIndex& block, RandomStream& stream);

// Influence of one block: P(1_A(omega) != 1_A(omega-tilde)) with the block
// resampled, A evaluated by full reveal.
Estimate estimateInfluence(const BlockPartition& partition, const BlockIndex& block, double lambda,
                           long replicas, std::uint64_t masterSeed, int workers = 1);

struct PivotalReport {
  std::vector<int> pivotalPointIds;
  int configSize = 0;
};

// Points whose star <-> arrow(rho) mark swap flips the indicator of A.
PivotalReport pivotalPoints(const PointConfiguration& config, double lambda, int n, double alpha);

// 2d / (2d lambda + 1)^2.
double russoConstant(double lambda, int d);

struct RussoCheckResult {
  Estimate finiteDifference;  // (P(A; lambda+h) - P(A; lambda-h)) / 2h, common random numbers
  Estimate pivotalForm;       // C(lambda) * mean |Piv|
  double cLambda = 0.0;
  long couplingViolations = 0;  // replicas where the lambda+h indicator fell below lambda-h
};

RussoCheckResult russoCheck(int d, double lambda, double h, int n, double alpha, long replicas,
                            std::uint64_t masterSeed, int workers = 1);

struct OsssCheckResult {
  Estimate theta;
  Estimate lhs;  // theta(1-theta), delta-method stderr
  Estimate rhs;  // sum over blocks of revealment * influence
  std::vector<Vertex> axes;
  std::vector<double> revealmentPerAxis;
  std::vector<double> influencePerAxis;  // summed over the axis's slots
  long blockCount = 0;
};

// Empirical check of Var(1_A) <= sum delta * Inf. Three independent replica
// pools (theta, revealment, influence); the rhs stderr combines the
// revealment-pool and influence-pool fluctuations of the weighted sums.
OsssCheckResult osssCheck(int d, double lambda, int k, int n, double alpha, double epsilon,
                          long replicas, std::uint64_t masterSeed, int workers = 1);

}  // namespace cplab
