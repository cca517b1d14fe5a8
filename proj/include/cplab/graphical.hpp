#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cplab/lattice.hpp"
#include "cplab/random.hpp"

namespace cplab {

// Graphical representation of the contact process on a finite space-time
// window: a marked Poisson point process with one rate-1 axis per vertex
// over [timeFloor, 0]. Marks are derived, not stored: a point with uniform
// label U becomes a healing star at rate parameter lambda iff
// U <= 1/(2*d*lambda + 1), otherwise an infection arrow along its direction
// label. Evaluating marks per lambda on one labelled configuration is the
// coupling that makes all monotonicity checks exact per sample.

struct SpaceTimePoint {
  Vertex vertex;
  double time = 0.0;  // in [timeFloor, 0]
  double u = 0.0;     // uniform label in [0,1)
  int dir = 0;        // direction label in [0, 2d)
};

struct Mark {
  bool isStar = false;
  int dir = 0;  // arrow direction; retained for stars so a flip can restore it
};

struct SpaceTimeWindow {
  std::vector<Vertex> region;  // lex-sorted
  double timeFloor = 0.0;      // <= 0
};

SpaceTimeWindow makeWindow(std::vector<Vertex> region, double timeFloor);

// Union of balls around the targets, with timeFloor -r: the smallest window
// on which every target's truncated occupancy is defined.
SpaceTimeWindow windowFor(const std::vector<Vertex>& targets, double r);

class PointConfiguration {
 public:
  PointConfiguration() = default;
  // Sorts points by (time, vertex) and indexes them per axis; throws if a
  // point lies outside the window.
  PointConfiguration(SpaceTimeWindow window, std::vector<SpaceTimePoint> points);

  const SpaceTimeWindow& window() const { return window_; }
  const std::vector<SpaceTimePoint>& points() const { return points_; }
  int dim() const;

  // Indices into points() for one axis, ascending in time; null if none.
  const std::vector<int>* axisPoints(const Vertex& axis) const;

 private:
  SpaceTimeWindow window_;
  std::vector<SpaceTimePoint> points_;
  std::unordered_map<Vertex, std::vector<int>, VertexHash> axisIndex_;
};

// Independent rate-1 Poisson points per axis on (timeFloor, 0], each with
// fresh U and direction labels. Per-point draw order is gap, U, direction.
PointConfiguration samplePoints(const SpaceTimeWindow& window, RandomStream& stream);

// Points on one axis in (lo, hi] with rate 1 and fresh labels; the shared
// primitive behind samplePoints and block resampling.
std::vector<SpaceTimePoint> poissonPointsOnAxis(const Vertex& axis, double lo, double hi,
                                                RandomStream& stream);

Mark markAt(const SpaceTimePoint& point, double lambda, int d);
std::vector<Mark> marksFor(const PointConfiguration& config, double lambda);
double starThreshold(double lambda, int d);  // 1/(2*d*lambda + 1)

// Active space-time path from (fromV, fromT) to (toV, toT) through the
// configuration's events, moving upward in time, blocked by stars, jumping
// along arrows. Path vertices are confined to the window region.
bool activePathExists(const PointConfiguration& config, double lambda, const Vertex& fromV,
                      double fromT, const Vertex& toV, double toT);

struct FieldProvenance {
  double lambda = 0.0;
  double truncationRadius = 0.0;
  std::uint64_t masterSeed = 0;
  std::uint64_t replicaIndex = 0;
};

struct OccupiedField {
  std::vector<Vertex> region;  // lex-sorted
  std::vector<std::uint8_t> bits;
  FieldProvenance provenance;

  bool bitAt(const Vertex& v) const;
  int indexOf(const Vertex& v) const { return sortedIndexOf(region, v); }
};

// Truncated occupancy: bit(v) = 1 iff an active path reaches (v, 0) from the
// floor ball(v,r) x {-r} or from the spatial shell d(v,.) = floor(r) at any
// time in [-r, 0). Computed by a forward time sweep per target in which all
// sites start active at -r, the shell is permanently active, stars kill
// interior sites and arrows reactivate the pointed neighbour.
OccupiedField truncatedField(const PointConfiguration& config, double lambda,
                             const std::vector<Vertex>& targets, double r,
                             FieldProvenance provenance = {});

OccupiedField truncatedFieldWithMarks(const PointConfiguration& config,
                                      const std::vector<Mark>& marks,
                                      const std::vector<Vertex>& targets, double r,
                                      FieldProvenance provenance = {});

// Fields for several lambdas from one labelled configuration (strictly
// ascending, all positive). Output order matches input order.
std::vector<OccupiedField> coupledFields(const PointConfiguration& config,
                                         const std::vector<double>& lambdas,
                                         const std::vector<Vertex>& targets, double r);

// Debug dump, one point per line: vertex time U rho, in (time, vertex) order.
std::string dumpConfiguration(const PointConfiguration& config);

// --- single-target sweep internals, reused by the OSSS machinery ---

struct TargetBox {
  Vertex target;
  double radius = 0.0;
  int shellDist = 0;             // floor(radius)
  std::vector<Vertex> box;       // lex-sorted ball(target, radius)
  std::vector<std::uint8_t> interior;  // per box position: d(target,.) < shellDist
  int targetPos = 0;
};

TargetBox makeTargetBox(const Vertex& target, double r);

// Replaces one axis's points (and aligned marks) during a sweep without
// rebuilding the configuration; used for block resampling.
struct AxisOverride {
  Vertex axis;
  const std::vector<SpaceTimePoint>* points = nullptr;
  const std::vector<Mark>* marks = nullptr;
};

struct SweepWorkspace {
  struct Event {
    double time;
    int srcPos;
    int dstPos;  // -1 when outside the box or for stars
    bool star;
  };
  std::vector<Event> events;
  std::vector<std::uint8_t> active;
};

bool sweepOccupied(const PointConfiguration& config, const std::vector<Mark>& marks,
                   const TargetBox& box, const AxisOverride* axisOverride, SweepWorkspace& ws);

}  // namespace cplab
