#pragma once

#include <cstdint>
#include <vector>

#include "cplab/percolation.hpp"

namespace cplab {

// Renormalization blocks: annulus-crossing events A_v between the spheres of
// radii dN/2 and dN around vN, good vertices (0 <-> ball(vN, dN/2)), the
// 3dN-separation independence structure and the covering inequality
// |C| >= n  =>  |S| >= n / |Lambda_{dN/2}|.

struct BlockSpec {
  int N = 2;  // even
  Vertex v;   // block index; physical center is vN
};

// 1 iff the truncated field (radius N^alpha) connects sphere(vN, dN/2) to
// sphere(vN, dN) inside ball(vN, dN). Throws when the configuration window
// does not cover ball(vN, dN + N^alpha) x [-N^alpha, 0].
bool blockEventIndicator(const Vertex& v, int N, const PointConfiguration& config, double lambda,
                         double alpha);

// Block indices v with 0 <-> ball(vN, dN/2) through the occupied field,
// restricted to the given index region. Sorted.
std::vector<Vertex> goodVertices(const OccupiedField& sample, int N,
                                 const std::vector<Vertex>& blockIndexRegion);

struct IndependenceResult {
  Estimate corr;
  Estimate probA;
  Estimate probB;
  bool regionsDisjoint = false;  // the two indicators read disjoint space-time sets
  double readRadius = 0.0;       // dN + N^alpha
};

// Sample correlation of the indicators of A_v and A_w across replicas;
// requires d(vN, wN) >= 3dN. When 2(dN + N^alpha) < 3dN the two indicators
// are functions of disjoint point sets and therefore exactly independent.
IndependenceResult independenceCheck(int d, const Vertex& v, const Vertex& w, int N, double lambda,
                                     double alpha, long replicas, std::uint64_t masterSeed,
                                     int workers = 1);

// Greedy sub-lattice extraction: keeps a subset of W whose members are
// pairwise at graph distance >= minSeparation (first-fit over the lex order).
// Used by fixtures that need 3d-separated block families.
std::vector<Vertex> selectSeparated(const std::vector<Vertex>& w, int minSeparation);

struct BlockTailResult {
  std::vector<int> sizes;
  std::vector<Estimate> tail;  // direct P(|C| >= size)
  Estimate blockEventProb;     // P(A_0) at this N
  long coveringViolations = 0; // replicas with |C| > |S| * |Lambda_{dN/2}|
  double edgeTouchFraction = 0.0;
  long ballHalfSize = 0;       // |Lambda_{dN/2}|
};

// Direct cluster tail, P(A_0) and the per-sample covering inequality on one
// shared field per replica. Truncation radius N^alpha; boxRadius must be at
// least dN so A_0 fits inside the observation box.
BlockTailResult blockTailExperiment(int d, double lambda, int N, const std::vector<int>& sizes,
                                    int boxRadius, double alpha, long replicas,
                                    std::uint64_t masterSeed, int workers = 1);

}  // namespace cplab
