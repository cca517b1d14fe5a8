#include "cplab/graphical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cplab {

SpaceTimeWindow makeWindow(std::vector<Vertex> region, double timeFloor) {
  if (timeFloor > 0) throw std::invalid_argument("makeWindow: timeFloor must be <= 0");
  std::sort(region.begin(), region.end());
  region.erase(std::unique(region.begin(), region.end()), region.end());
  return SpaceTimeWindow{std::move(region), timeFloor};
}

SpaceTimeWindow windowFor(const std::vector<Vertex>& targets, double r) {
  std::vector<Vertex> region;
  for (const Vertex& v : targets) {
    auto ball = ballVertices(v, r);
    region.insert(region.end(), ball.begin(), ball.end());
  }
  return makeWindow(std::move(region), -r);
}

PointConfiguration::PointConfiguration(SpaceTimeWindow window, std::vector<SpaceTimePoint> points)
    : window_(std::move(window)), points_(std::move(points)) {
  if (window_.region.empty()) throw std::invalid_argument("PointConfiguration: empty window");
  std::sort(points_.begin(), points_.end(), [](const SpaceTimePoint& a, const SpaceTimePoint& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.vertex < b.vertex;
  });
  for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
    const SpaceTimePoint& p = points_[static_cast<std::size_t>(i)];
    if (p.time < window_.timeFloor || p.time > 0 || !sortedContains(window_.region, p.vertex))
      throw std::invalid_argument("PointConfiguration: point outside window");
    axisIndex_[p.vertex].push_back(i);
  }
}

int PointConfiguration::dim() const { return window_.region.front().dim(); }

const std::vector<int>* PointConfiguration::axisPoints(const Vertex& axis) const {
  auto it = axisIndex_.find(axis);
  return it == axisIndex_.end() ? nullptr : &it->second;
}

std::vector<SpaceTimePoint> poissonPointsOnAxis(const Vertex& axis, double lo, double hi,
                                                RandomStream& stream) {
  std::vector<SpaceTimePoint> out;
  double t = lo;
  for (;;) {
    t += stream.exponential();
    if (t > hi) break;
    SpaceTimePoint p;
    p.vertex = axis;
    p.time = t;
    p.u = stream.uniform01();
    p.dir = static_cast<int>(stream.uniformInt(static_cast<std::uint32_t>(2 * axis.dim())));
    out.push_back(p);
  }
  return out;
}

PointConfiguration samplePoints(const SpaceTimeWindow& window, RandomStream& stream) {
  if (window.region.empty()) throw std::invalid_argument("samplePoints: empty window");
  std::vector<SpaceTimePoint> pts;
  for (const Vertex& axis : window.region) {
    auto axisPts = poissonPointsOnAxis(axis, window.timeFloor, 0.0, stream);
    pts.insert(pts.end(), axisPts.begin(), axisPts.end());
  }
  return PointConfiguration(window, std::move(pts));
}

double starThreshold(double lambda, int d) {
  if (lambda <= 0) throw std::invalid_argument("starThreshold: lambda must be positive");
  return 1.0 / (2.0 * d * lambda + 1.0);
}

Mark markAt(const SpaceTimePoint& point, double lambda, int d) {
  if (point.vertex.dim() != d) throw std::invalid_argument("markAt: dimension mismatch");
  Mark m;
  m.isStar = point.u <= starThreshold(lambda, d);
  m.dir = point.dir;
  return m;
}

std::vector<Mark> marksFor(const PointConfiguration& config, double lambda) {
  const int d = config.dim();
  const double thr = starThreshold(lambda, d);
  std::vector<Mark> marks(config.points().size());
  for (std::size_t i = 0; i < marks.size(); ++i) {
    marks[i].isStar = config.points()[i].u <= thr;
    marks[i].dir = config.points()[i].dir;
  }
  return marks;
}

bool activePathExists(const PointConfiguration& config, double lambda, const Vertex& fromV,
                      double fromT, const Vertex& toV, double toT) {
  const SpaceTimeWindow& w = config.window();
  if (!(fromT < toT)) throw std::invalid_argument("activePathExists: from.time must precede to.time");
  if (fromT < w.timeFloor || toT > 0 || !sortedContains(w.region, fromV) ||
      !sortedContains(w.region, toV))
    throw std::invalid_argument("activePathExists: endpoint outside window");

  const auto marks = marksFor(config, lambda);
  std::vector<std::uint8_t> active(w.region.size(), 0);
  active[static_cast<std::size_t>(sortedIndexOf(w.region, fromV))] = 1;

  // Points are already (time, vertex)-sorted; process (fromT, toT].
  for (std::size_t i = 0; i < config.points().size(); ++i) {
    const SpaceTimePoint& p = config.points()[i];
    if (p.time <= fromT) continue;
    if (p.time > toT) break;
    const int src = sortedIndexOf(w.region, p.vertex);
    if (marks[i].isStar) {
      active[static_cast<std::size_t>(src)] = 0;
    } else if (active[static_cast<std::size_t>(src)]) {
      const int dst = sortedIndexOf(w.region, neighborAlong(p.vertex, marks[i].dir));
      if (dst >= 0) active[static_cast<std::size_t>(dst)] = 1;
    }
  }
  return active[static_cast<std::size_t>(sortedIndexOf(w.region, toV))] != 0;
}

bool OccupiedField::bitAt(const Vertex& v) const {
  const int i = indexOf(v);
  if (i < 0) throw std::invalid_argument("OccupiedField: vertex outside field region");
  return bits[static_cast<std::size_t>(i)] != 0;
}

TargetBox makeTargetBox(const Vertex& target, double r) {
  TargetBox b;
  b.target = target;
  b.radius = r;
  b.shellDist = static_cast<int>(std::floor(r));
  b.box = ballVertices(target, r);
  b.interior.resize(b.box.size());
  for (std::size_t i = 0; i < b.box.size(); ++i)
    b.interior[i] = graphDistance(target, b.box[i]) < b.shellDist ? 1 : 0;
  b.targetPos = sortedIndexOf(b.box, target);
  return b;
}

bool sweepOccupied(const PointConfiguration& config, const std::vector<Mark>& marks,
                   const TargetBox& box, const AxisOverride* axisOverride, SweepWorkspace& ws) {
  const double tMin = -box.radius;
  ws.events.clear();

  auto addEvent = [&](double time, const Vertex& axis, int srcPos, bool star, int dir) {
    if (time <= tMin || time > 0) return;
    SweepWorkspace::Event ev;
    ev.time = time;
    ev.srcPos = srcPos;
    ev.star = star;
    ev.dstPos = star ? -1 : sortedIndexOf(box.box, neighborAlong(axis, dir));
    ws.events.push_back(ev);
  };

  for (std::size_t pos = 0; pos < box.box.size(); ++pos) {
    const Vertex& axis = box.box[pos];
    if (axisOverride && axis == axisOverride->axis) {
      const auto& pts = *axisOverride->points;
      const auto& mks = *axisOverride->marks;
      for (std::size_t j = 0; j < pts.size(); ++j)
        addEvent(pts[j].time, axis, static_cast<int>(pos), mks[j].isStar, mks[j].dir);
      continue;
    }
    const std::vector<int>* idx = config.axisPoints(axis);
    if (!idx) continue;
    for (int i : *idx) {
      const SpaceTimePoint& p = config.points()[static_cast<std::size_t>(i)];
      addEvent(p.time, axis, static_cast<int>(pos), marks[static_cast<std::size_t>(i)].isStar,
               marks[static_cast<std::size_t>(i)].dir);
    }
  }

  std::sort(ws.events.begin(), ws.events.end(),
            [](const SweepWorkspace::Event& a, const SweepWorkspace::Event& b) {
              if (a.time != b.time) return a.time < b.time;
              return a.srcPos < b.srcPos;
            });

  ws.active.assign(box.box.size(), 1);
  for (const auto& ev : ws.events) {
    if (ev.star) {
      if (box.interior[static_cast<std::size_t>(ev.srcPos)])
        ws.active[static_cast<std::size_t>(ev.srcPos)] = 0;
    } else if (ws.active[static_cast<std::size_t>(ev.srcPos)] && ev.dstPos >= 0 &&
               box.interior[static_cast<std::size_t>(ev.dstPos)]) {
      ws.active[static_cast<std::size_t>(ev.dstPos)] = 1;
    }
  }
  return ws.active[static_cast<std::size_t>(box.targetPos)] != 0;
}

namespace {

void validateWindowCovers(const PointConfiguration& config, const std::vector<Vertex>& targets,
                          double r) {
  const SpaceTimeWindow& w = config.window();
  if (w.timeFloor > -r)
    throw std::invalid_argument("truncatedField: window time range shorter than truncation radius");
  for (const Vertex& v : targets)
    for (const Vertex& b : ballVertices(v, r))
      if (!sortedContains(w.region, b))
        throw std::invalid_argument("truncatedField: window region does not cover ball(" + v.str() +
                                    ", r)");
}

}  // namespace

OccupiedField truncatedFieldWithMarks(const PointConfiguration& config,
                                      const std::vector<Mark>& marks,
                                      const std::vector<Vertex>& targets, double r,
                                      FieldProvenance provenance) {
  if (r < 0) throw std::invalid_argument("truncatedField: negative truncation radius");
  validateWindowCovers(config, targets, r);

  OccupiedField field;
  field.region = targets;
  std::sort(field.region.begin(), field.region.end());
  field.region.erase(std::unique(field.region.begin(), field.region.end()), field.region.end());
  field.bits.resize(field.region.size());
  field.provenance = provenance;
  field.provenance.truncationRadius = r;

  SweepWorkspace ws;
  for (std::size_t i = 0; i < field.region.size(); ++i) {
    const TargetBox box = makeTargetBox(field.region[i], r);
    field.bits[i] = sweepOccupied(config, marks, box, nullptr, ws) ? 1 : 0;
  }
  return field;
}

OccupiedField truncatedField(const PointConfiguration& config, double lambda,
                             const std::vector<Vertex>& targets, double r,
                             FieldProvenance provenance) {
  provenance.lambda = lambda;
  return truncatedFieldWithMarks(config, marksFor(config, lambda), targets, r, provenance);
}

std::vector<OccupiedField> coupledFields(const PointConfiguration& config,
                                         const std::vector<double>& lambdas,
                                         const std::vector<Vertex>& targets, double r) {
  if (lambdas.empty()) throw std::invalid_argument("coupledFields: empty lambda list");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (lambdas[i] <= 0) throw std::invalid_argument("coupledFields: lambdas must be positive");
    if (i > 0 && lambdas[i] <= lambdas[i - 1])
      throw std::invalid_argument("coupledFields: lambdas must be strictly increasing");
  }
  std::vector<OccupiedField> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) out.push_back(truncatedField(config, lambda, targets, r));
  return out;
}

std::string dumpConfiguration(const PointConfiguration& config) {
  std::string out;
  char buf[64];
  for (const SpaceTimePoint& p : config.points()) {
    out += p.vertex.str();
    std::snprintf(buf, sizeof buf, " %.17g %.17g ", p.time, p.u);
    out += buf;
    out += directionName(p.dir);
    out += "\n";
  }
  return out;
}

}  // namespace cplab
