#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cplab/harness.hpp"

namespace {

std::vector<double> parseLambdaGrid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
    throw cplab::ValidationError("lambda grid must be lo:hi:step with positive step");
  std::vector<double> grid;
  for (double x = lo; x <= hi + 1e-12; x += step) grid.push_back(x);
  if (grid.empty()) throw cplab::ValidationError("empty lambda grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact-process percolation laboratory"};

  std::string experiment, lambdaGrid, nListArg, configPath, outPath;
  double lambda = 0, alpha = 0, epsilon = 0, h = 0, refMultiplier = 0;
  int d = 0, n = 0, k = 0, capN = 0, workers = -1, boxRadius = 0;
  long replicas = -1;
  std::uint64_t seed = 0;

  auto* oExperiment = app.add_option("--experiment", experiment, "experiment id");
  auto* oD = app.add_option("--d", d, "lattice dimension");
  auto* oLambda = app.add_option("--lambda", lambda, "infection rate");
  auto* oLambdaGrid = app.add_option("--lambda-grid", lambdaGrid, "lambda grid lo:hi:step");
  auto* oN = app.add_option("--n", n, "observation scale n");
  auto* oNList = app.add_option("--n-list", nListArg, "comma-separated n list");
  auto* oK = app.add_option("--k", k, "decision-tree seed sphere radius");
  auto* oAlpha = app.add_option("--alpha", alpha, "truncation exponent");
  auto* oEpsilon = app.add_option("--epsilon", epsilon, "block time step");
  auto* oCapN = app.add_option("--cap-N", capN, "renormalization block scale N");
  auto* oReplicas = app.add_option("--replicas", replicas, "Monte Carlo replicas");
  auto* oSeed = app.add_option("--seed", seed, "master seed");
  auto* oWorkers = app.add_option("--workers", workers, "worker threads (0 = all)");
  auto* oOut = app.add_option("--out", outPath, "output CSV path");
  app.add_option("--config", configPath, "JSON config file (flags override)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    cplab::ExperimentConfig config;
    if (!configPath.empty()) {
      std::ifstream f(configPath);
      if (!f) throw cplab::ValidationError("cannot read config file " + configPath);
      nlohmann::json j;
      f >> j;
      // result sidecars wrap the resolved config, accept them directly
      if (j.contains("config")) j = j.at("config");
      config = j.get<cplab::ExperimentConfig>();
    }
    if (oExperiment->count()) config.experiment = experiment;
    if (oD->count()) config.d = d;
    if (oLambda->count() && oLambdaGrid->count())
      throw cplab::ValidationError("--lambda and --lambda-grid are mutually exclusive");
    if (oLambda->count()) config.lambdas = {lambda};
    if (oLambdaGrid->count()) config.lambdas = parseLambdaGrid(lambdaGrid);
    if (oN->count() && oNList->count())
      throw cplab::ValidationError("--n and --n-list are mutually exclusive");
    if (oN->count()) config.ns = {n};
    if (oNList->count()) {
      config.ns.clear();
      std::string item;
      for (std::istringstream in(nListArg); std::getline(in, item, ',');)
        config.ns.push_back(std::stoi(item));
    }
    if (oK->count()) config.k = k;
    if (oAlpha->count()) config.alpha = alpha;
    if (oEpsilon->count()) config.epsilon = epsilon;
    if (oCapN->count()) config.capN = capN;
    if (oReplicas->count()) config.replicas = replicas;
    if (oSeed->count()) config.masterSeed = seed;
    if (oWorkers->count()) config.workers = workers;
    if (oOut->count()) config.outputPath = outPath;

    cplab::runExperiment(config);
    return 0;
  } catch (const cplab::ValidationError& e) {
    std::cerr << "validation_error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation_error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime_error: " << e.what() << "\n";
    return 3;
  }
}
