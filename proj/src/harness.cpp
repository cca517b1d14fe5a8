#include "cplab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "cplab/osss.hpp"
#include "cplab/percolation.hpp"
#include "cplab/renorm.hpp"

namespace cplab {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct ResultRow {
  std::optional<double> lambda;
  std::optional<int> n;
  std::optional<int> k;
  std::optional<double> epsilon;
  std::optional<int> N;
  std::optional<double> estimate;
  std::optional<double> se;
  long replicas = 0;
  std::string diagnostics;
};

class CsvBuilder {
 public:
  CsvBuilder(const ExperimentConfig& cfg) : cfg_(cfg) {
    body_ += "experiment,d,lambda,n,k,alpha,epsilon,N,estimate,stderr,replicas,diagnostics,wall_time_ms\n";
  }

  void add(const ResultRow& r) { rows_.push_back(r); }

  std::string finish(double wallMs) {
    for (const ResultRow& r : rows_) {
      body_ += cfg_.experiment + "," + std::to_string(cfg_.d) + ",";
      body_ += (r.lambda ? fmt(*r.lambda) : "") + std::string(",");
      body_ += (r.n ? std::to_string(*r.n) : "") + std::string(",");
      body_ += (r.k ? std::to_string(*r.k) : "") + std::string(",");
      body_ += fmt(cfg_.alpha) + std::string(",");
      body_ += (r.epsilon ? fmt(*r.epsilon) : "") + std::string(",");
      body_ += (r.N ? std::to_string(*r.N) : "") + std::string(",");
      body_ += (r.estimate ? fmt(*r.estimate) : "") + std::string(",");
      body_ += (r.se ? fmt(*r.se) : "") + std::string(",");
      body_ += std::to_string(r.replicas) + ",";
      body_ += r.diagnostics + ",";
      body_ += fmt(wallMs) + "\n";
    }
    return body_;
  }

 private:
  const ExperimentConfig& cfg_;
  std::string body_;
  std::vector<ResultRow> rows_;
};

std::string diag(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::string out;
  for (const auto& [key, value] : kv) out += key + "=" + value + ";";
  return out;
}

std::string vertexDiag(const Vertex& v) {
  std::string s = v.str();
  // CSV field: avoid the column separator inside the diagnostics list.
  for (char& c : s)
    if (c == ',') c = ' ';
  return s;
}

bool isKnownExperiment(const std::string& e) {
  static const std::vector<std::string> known = {"theta-curve",  "tail",        "tv-gap",
                                                 "osss-check",   "russo-check", "revealment",
                                                 "renorm-independence", "renorm-tail"};
  for (const auto& k : known)
    if (k == e) return true;
  return false;
}

}  // namespace

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"experiment", c.experiment},
                     {"d", c.d},
                     {"lambdas", c.lambdas},
                     {"n_list", c.ns},
                     {"k", c.k},
                     {"alpha", c.alpha},
                     {"epsilon", c.epsilon},
                     {"N", c.capN},
                     {"replicas", c.replicas},
                     {"seed", c.masterSeed},
                     {"workers", c.workers},
                     {"out", c.outputPath},
                     {"sizes", c.sizes},
                     {"ref_multiplier", c.refMultiplier},
                     {"h", c.h},
                     {"box_radius", c.boxRadius},
                     {"separation", c.separation}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  auto get = [&j](const char* key, auto& into) {
    if (j.contains(key)) j.at(key).get_to(into);
  };
  get("experiment", c.experiment);
  get("d", c.d);
  if (j.contains("lambda")) {
    double l = j.at("lambda").get<double>();
    c.lambdas = {l};
  }
  get("lambdas", c.lambdas);
  if (j.contains("n")) {
    int n = j.at("n").get<int>();
    c.ns = {n};
  }
  get("n_list", c.ns);
  get("k", c.k);
  get("alpha", c.alpha);
  get("epsilon", c.epsilon);
  get("N", c.capN);
  get("replicas", c.replicas);
  get("seed", c.masterSeed);
  get("workers", c.workers);
  get("out", c.outputPath);
  get("sizes", c.sizes);
  get("ref_multiplier", c.refMultiplier);
  get("h", c.h);
  get("box_radius", c.boxRadius);
  get("separation", c.separation);
}

ExperimentConfig resolveConfig(const ExperimentConfig& raw) {
  ExperimentConfig c = raw;
  if (!isKnownExperiment(c.experiment))
    throw ValidationError("unknown experiment '" + c.experiment + "'");
  if (c.d < 2 || c.d > Vertex::kMaxDim)
    throw ValidationError("d must be in [2, " + std::to_string(Vertex::kMaxDim) + "]");
  if (c.replicas < 1) throw ValidationError("replicas must be positive");
  if (!(c.alpha > 0.0) || !(c.alpha < 1.0 / (c.d - 1)))
    throw ValidationError("alpha must lie in (0, 1/(d-1))");
  if (c.lambdas.empty()) throw ValidationError("lambda required");
  for (std::size_t i = 0; i < c.lambdas.size(); ++i) {
    if (c.lambdas[i] <= 0) throw ValidationError("lambda must be positive");
    if (i > 0 && c.lambdas[i] <= c.lambdas[i - 1])
      throw ValidationError("lambda grid must be strictly increasing");
  }
  if (c.workers < 0) throw ValidationError("workers must be nonnegative");
  if (c.workers == 0)
    c.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (c.outputPath.empty()) throw ValidationError("output path required");

  const bool needsN = c.experiment == "theta-curve" || c.experiment == "tv-gap" ||
                      c.experiment == "osss-check" || c.experiment == "russo-check" ||
                      c.experiment == "revealment";
  if (needsN) {
    if (c.ns.empty()) {
      if (c.experiment == "theta-curve" || c.experiment == "tv-gap")
        c.ns = {1, 2, 3, 4};
      else
        throw ValidationError("n required for " + c.experiment);
    }
    for (std::size_t i = 0; i < c.ns.size(); ++i) {
      if (c.ns[i] < 1) throw ValidationError("n must be >= 1");
      if (i > 0 && c.ns[i] <= c.ns[i - 1]) throw ValidationError("n list must be strictly increasing");
    }
  }

  if (c.experiment == "osss-check" || c.experiment == "revealment") {
    const int n = c.ns.front();
    if (c.k < 1 || c.k > n) throw ValidationError("k must lie in [1, n]");
    const double r = std::pow(static_cast<double>(n), c.alpha);
    if (c.epsilon == 0.0) c.epsilon = r / 8.0;
    const double ratio = r / c.epsilon;
    if (!(c.epsilon > 0) || c.epsilon > r || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
      throw ValidationError("n^alpha / epsilon must be a positive integer");
  }

  if (c.experiment == "russo-check") {
    if (c.lambdas.size() != 1) throw ValidationError("russo-check takes a single lambda");
    if (!(c.h > 0) || !(c.lambdas[0] - c.h > 0)) throw ValidationError("need 0 < h < lambda");
  }

  if (c.experiment == "tv-gap" && !(c.refMultiplier > 1.0))
    throw ValidationError("ref_multiplier must exceed 1");

  if (c.experiment == "tail" || c.experiment == "renorm-tail") {
    if (c.sizes.empty())
      for (int s = 1; s <= 12; ++s) c.sizes.push_back(s);
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
      if (c.sizes[i] < 0) throw ValidationError("sizes must be nonnegative");
      if (i > 0 && c.sizes[i] <= c.sizes[i - 1])
        throw ValidationError("sizes must be strictly increasing");
    }
  }

  if (c.experiment == "renorm-independence" || c.experiment == "renorm-tail") {
    if (c.capN < 2 || c.capN % 2 != 0) throw ValidationError("N must be even and positive");
  }
  if (c.experiment == "renorm-independence") {
    if (c.separation.empty()) {
      c.separation.assign(static_cast<std::size_t>(c.d), 0);
      c.separation[0] = 3 * c.d;
    } else if (c.separation.size() != static_cast<std::size_t>(c.d)) {
      throw ValidationError("separation must have d entries");
    }
  }
  if (c.experiment == "tail" && c.boxRadius == 0) c.boxRadius = c.sizes.back();
  if (c.experiment == "renorm-tail" && c.boxRadius == 0)
    c.boxRadius = std::max(c.d * c.capN, c.sizes.back());
  return c;
}

namespace {

void runThetaCurve(const ExperimentConfig& c, CsvBuilder& csv) {
  const ThetaCurve curve =
      estimateThetaCurve(c.d, c.lambdas, c.ns, c.alpha, c.replicas, c.masterSeed, c.workers);
  const std::string shared =
      diag({{"gamma", fmt(gammaExponent(c.d, c.alpha))},
            {"lambda_monotone_violations", std::to_string(curve.lambdaMonotoneViolations)},
            {"n_monotone_violations", std::to_string(curve.nMonotoneViolations)}});
  for (std::size_t li = 0; li < curve.lambdas.size(); ++li) {
    for (std::size_t ni = 0; ni < curve.ns.size(); ++ni) {
      ResultRow r;
      r.lambda = curve.lambdas[li];
      r.n = curve.ns[ni];
      r.estimate = curve.cells[li][ni].mean;
      r.se = curve.cells[li][ni].se;
      r.replicas = curve.cells[li][ni].replicas;
      r.diagnostics = shared;
      csv.add(r);
    }
  }
}

void runTail(const ExperimentConfig& c, CsvBuilder& csv) {
  const TailResult res = clusterSizeTail(c.d, c.lambdas[0], c.sizes, c.boxRadius, c.alpha,
                                         c.replicas, c.masterSeed, c.workers);
  for (std::size_t s = 0; s < res.sizes.size(); ++s) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = res.sizes[s];
    r.estimate = res.tail[s].mean;
    r.se = res.tail[s].se;
    r.replicas = res.tail[s].replicas;
    r.diagnostics = diag({{"box_radius", std::to_string(c.boxRadius)}});
    csv.add(r);
  }
  ResultRow fitRow;
  fitRow.lambda = c.lambdas[0];
  fitRow.estimate = res.fit.rate;
  fitRow.replicas = c.replicas;
  fitRow.diagnostics = diag({{"quantity", "fit"},
                             {"fit_amplitude", fmt(res.fit.amplitude)},
                             {"fit_rate", fmt(res.fit.rate)},
                             {"fit_r_squared", fmt(res.fit.rSquared)},
                             {"fit_points_used", std::to_string(res.fit.pointsUsed)},
                             {"fit_points_dropped", std::to_string(res.fit.pointsDropped)},
                             {"edge_touch_fraction", fmt(res.edgeTouchFraction)},
                             {"box_radius", std::to_string(c.boxRadius)}});
  csv.add(fitRow);
}

void runTvGap(const ExperimentConfig& c, CsvBuilder& csv) {
  const GapCurve res = truncationGapCurve(c.d, c.lambdas[0], c.ns, c.alpha, c.refMultiplier,
                                          c.replicas, c.masterSeed, c.workers);
  for (std::size_t i = 0; i < res.ns.size(); ++i) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = res.ns[i];
    r.estimate = res.gap[i].mean;
    r.se = res.gap[i].se;
    r.replicas = res.gap[i].replicas;
    r.diagnostics = diag({{"reference_radius", fmt(res.referenceRadius)}});
    csv.add(r);
  }
  ResultRow fitRow;
  fitRow.lambda = c.lambdas[0];
  fitRow.estimate = res.fit.rate;
  fitRow.replicas = c.replicas;
  fitRow.diagnostics = diag({{"quantity", "fit"},
                             {"fit_amplitude", fmt(res.fit.amplitude)},
                             {"fit_rate", fmt(res.fit.rate)},
                             {"fit_r_squared", fmt(res.fit.rSquared)},
                             {"fit_points_used", std::to_string(res.fit.pointsUsed)},
                             {"fit_points_dropped", std::to_string(res.fit.pointsDropped)},
                             {"monotone_violations", std::to_string(res.monotoneViolations)},
                             {"reference_radius", fmt(res.referenceRadius)}});
  csv.add(fitRow);
}

void runOsssCheck(const ExperimentConfig& c, CsvBuilder& csv) {
  const int n = c.ns.front();
  const OsssCheckResult res = osssCheck(c.d, c.lambdas[0], c.k, n, c.alpha, c.epsilon, c.replicas,
                                        c.masterSeed, c.workers);
  auto addRow = [&](const char* quantity, const Estimate& e) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = n;
    r.k = c.k;
    r.epsilon = c.epsilon;
    r.estimate = e.mean;
    r.se = e.se;
    r.replicas = e.replicas;
    r.diagnostics = diag({{"quantity", quantity}, {"blocks", std::to_string(res.blockCount)}});
    csv.add(r);
  };
  addRow("theta", res.theta);
  addRow("lhs_variance", res.lhs);
  addRow("rhs_revealment_influence", res.rhs);
}

void runRussoCheck(const ExperimentConfig& c, CsvBuilder& csv) {
  const int n = c.ns.front();
  const RussoCheckResult res =
      russoCheck(c.d, c.lambdas[0], c.h, n, c.alpha, c.replicas, c.masterSeed, c.workers);
  auto addRow = [&](const char* quantity, const Estimate& e) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = n;
    r.estimate = e.mean;
    r.se = e.se;
    r.replicas = e.replicas;
    r.diagnostics = diag({{"quantity", quantity},
                          {"h", fmt(c.h)},
                          {"c_lambda", fmt(res.cLambda)},
                          {"coupling_violations", std::to_string(res.couplingViolations)}});
    csv.add(r);
  };
  addRow("finite_difference", res.finiteDifference);
  addRow("pivotal_form", res.pivotalForm);
}

void runRevealment(const ExperimentConfig& c, CsvBuilder& csv) {
  const int n = c.ns.front();
  const RevealmentTable table = estimateRevealmentTable(c.d, c.k, c.lambdas[0], n, c.alpha,
                                                        c.replicas, c.masterSeed, c.workers);
  for (std::size_t a = 0; a < table.axes.size(); ++a) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = n;
    r.k = c.k;
    r.estimate = table.revealment[a].mean;
    r.se = table.revealment[a].se;
    r.replicas = table.revealment[a].replicas;
    r.diagnostics = diag({{"axis", vertexDiag(table.axes[a])}});
    csv.add(r);
  }
}

void runRenormIndependence(const ExperimentConfig& c, CsvBuilder& csv) {
  Vertex v = origin(c.d);
  Vertex w(c.d);
  for (int i = 0; i < c.d; ++i) w[i] = c.separation[static_cast<std::size_t>(i)];
  const IndependenceResult res = independenceCheck(c.d, v, w, c.capN, c.lambdas[0], c.alpha,
                                                   c.replicas, c.masterSeed, c.workers);
  auto addRow = [&](const char* quantity, const Estimate& e) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.N = c.capN;
    r.estimate = e.mean;
    r.se = e.se;
    r.replicas = e.replicas;
    r.diagnostics = diag({{"quantity", quantity},
                          {"w", vertexDiag(w)},
                          {"regions_disjoint", res.regionsDisjoint ? "1" : "0"},
                          {"read_radius", fmt(res.readRadius)}});
    csv.add(r);
  };
  addRow("correlation", res.corr);
  addRow("prob_a", res.probA);
  addRow("prob_b", res.probB);
}

void runRenormTail(const ExperimentConfig& c, CsvBuilder& csv) {
  const BlockTailResult res = blockTailExperiment(c.d, c.lambdas[0], c.capN, c.sizes, c.boxRadius,
                                                  c.alpha, c.replicas, c.masterSeed, c.workers);
  for (std::size_t s = 0; s < res.sizes.size(); ++s) {
    ResultRow r;
    r.lambda = c.lambdas[0];
    r.n = res.sizes[s];
    r.N = c.capN;
    r.estimate = res.tail[s].mean;
    r.se = res.tail[s].se;
    r.replicas = res.tail[s].replicas;
    r.diagnostics = diag({{"box_radius", std::to_string(c.boxRadius)}});
    csv.add(r);
  }
  ResultRow summary;
  summary.lambda = c.lambdas[0];
  summary.N = c.capN;
  summary.estimate = res.blockEventProb.mean;
  summary.se = res.blockEventProb.se;
  summary.replicas = res.blockEventProb.replicas;
  summary.diagnostics = diag({{"quantity", "block_event_prob"},
                              {"covering_violations", std::to_string(res.coveringViolations)},
                              {"edge_touch_fraction", fmt(res.edgeTouchFraction)},
                              {"ball_half_size", std::to_string(res.ballHalfSize)},
                              {"box_radius", std::to_string(c.boxRadius)}});
  csv.add(summary);
}

}  // namespace

ExperimentOutput runExperimentInMemory(const ExperimentConfig& raw) {
  const ExperimentConfig c = resolveConfig(raw);
  CsvBuilder csv(c);
  const auto t0 = std::chrono::steady_clock::now();

  if (c.experiment == "theta-curve")
    runThetaCurve(c, csv);
  else if (c.experiment == "tail")
    runTail(c, csv);
  else if (c.experiment == "tv-gap")
    runTvGap(c, csv);
  else if (c.experiment == "osss-check")
    runOsssCheck(c, csv);
  else if (c.experiment == "russo-check")
    runRussoCheck(c, csv);
  else if (c.experiment == "revealment")
    runRevealment(c, csv);
  else if (c.experiment == "renorm-independence")
    runRenormIndependence(c, csv);
  else if (c.experiment == "renorm-tail")
    runRenormTail(c, csv);

  const double wallMs =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  ExperimentOutput out;
  out.csv = csv.finish(wallMs);
  out.sidecar = nlohmann::json{{"version", kVersion},
                               {"gamma", gammaExponent(c.d, c.alpha)},
                               {"config", c}};
  return out;
}

void runExperiment(const ExperimentConfig& config) {
  const ExperimentConfig c = resolveConfig(config);
  const ExperimentOutput out = runExperimentInMemory(c);
  {
    std::ofstream f(c.outputPath, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + c.outputPath);
    f << out.csv;
  }
  {
    std::ofstream f(c.outputPath + ".json", std::ios::binary);
    if (!f) throw std::runtime_error("cannot open sidecar file " + c.outputPath + ".json");
    f << out.sidecar.dump(2) << "\n";
  }
}

std::string csvWithoutWallTime(const std::string& csv) {
  std::string out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out += line.substr(0, pos == std::string::npos ? line.size() : pos + 1);
    out += "\n";
  }
  return out;
}

}  // namespace cplab
