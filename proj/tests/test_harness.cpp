#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include "cplab/harness.hpp"
#include "cplab/percolation.hpp"

using namespace cplab;

namespace {

ExperimentConfig thetaConfig() {
  ExperimentConfig c;
  c.experiment = "theta-curve";
  c.lambdas = {0.4, 0.8};
  c.ns = {1, 2};
  c.replicas = 200;
  c.masterSeed = 11;
  c.workers = 1;
  return c;
}

int runCli(const std::string& args) {
  const int status = std::system((std::string(CPLAB_CLI_PATH) + " " + args).c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config validation rejects the documented failure modes") {
  ExperimentConfig c = thetaConfig();
  c.replicas = 0;
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);

  c = thetaConfig();
  c.alpha = 1.0;
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);

  c = thetaConfig();
  c.experiment = "nonsense";
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);

  c = thetaConfig();
  c.experiment = "osss-check";
  c.lambdas = {0.4};
  c.ns = {4};
  c.k = 5;  // out of [1, n]
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);

  c.k = 2;
  c.epsilon = 0.3;  // 2 / 0.3 not integral
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);
  c.epsilon = 0.25;
  CHECK_NOTHROW(resolveConfig(c));

  c = thetaConfig();
  c.experiment = "renorm-independence";
  c.capN = 3;  // odd
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);

  c = thetaConfig();
  c.experiment = "russo-check";
  c.ns = {2};
  c.h = 0.5;  // lambda - h <= 0 for lambda 0.4
  c.lambdas = {0.4};
  CHECK_THROWS_AS(resolveConfig(c), ValidationError);
}

TEST_CASE("osss epsilon defaults to n^alpha / 8") {
  ExperimentConfig c = thetaConfig();
  c.experiment = "osss-check";
  c.lambdas = {0.4};
  c.ns = {4};
  c.k = 2;
  c.epsilon = 0.0;
  const ExperimentConfig r = resolveConfig(c);
  CHECK(r.epsilon == doctest::Approx(0.25));
}

TEST_CASE("identical configs give byte-identical CSV bodies up to wall time") {
  const ExperimentOutput a = runExperimentInMemory(thetaConfig());
  const ExperimentOutput b = runExperimentInMemory(thetaConfig());
  CHECK(csvWithoutWallTime(a.csv) == csvWithoutWallTime(b.csv));
  CHECK(a.csv.substr(0, a.csv.find('\n')) ==
        "experiment,d,lambda,n,k,alpha,epsilon,N,estimate,stderr,replicas,diagnostics,wall_time_ms");
}

TEST_CASE("worker count does not change any estimate") {
  ExperimentConfig one = thetaConfig();
  one.workers = 1;
  ExperimentConfig eight = thetaConfig();
  eight.workers = 8;
  const ExperimentOutput a = runExperimentInMemory(one);
  const ExperimentOutput b = runExperimentInMemory(eight);
  CHECK(csvWithoutWallTime(a.csv) == csvWithoutWallTime(b.csv));
}

TEST_CASE("sidecar config round-trips to the same results") {
  const ExperimentOutput first = runExperimentInMemory(thetaConfig());
  const ExperimentConfig replay = first.sidecar.at("config").get<ExperimentConfig>();
  const ExperimentOutput second = runExperimentInMemory(replay);
  CHECK(csvWithoutWallTime(first.csv) == csvWithoutWallTime(second.csv));
  CHECK(first.sidecar.at("version").get<std::string>() == std::string(kVersion));
  CHECK(first.sidecar.at("gamma").get<double>() == doctest::Approx(0.5));
}

TEST_CASE("every experiment emits rows in the flat schema") {
  auto rows = [](const std::string& csv) {
    long count = -1;  // skip header
    for (char ch : csv)
      if (ch == '\n') ++count;
    return count;
  };

  ExperimentConfig c = thetaConfig();
  CHECK(rows(runExperimentInMemory(c).csv) == 4);  // 2 lambdas x 2 ns

  c = thetaConfig();
  c.experiment = "tail";
  c.lambdas = {0.3};
  c.sizes = {1, 2, 3};
  c.replicas = 100;
  CHECK(rows(runExperimentInMemory(c).csv) == 4);  // sizes + fit row

  c = thetaConfig();
  c.experiment = "tv-gap";
  c.lambdas = {1.0};
  c.ns = {1, 2};
  c.replicas = 100;
  CHECK(rows(runExperimentInMemory(c).csv) == 3);  // ns + fit row

  c = thetaConfig();
  c.experiment = "russo-check";
  c.lambdas = {0.5};
  c.ns = {2};
  c.replicas = 100;
  CHECK(rows(runExperimentInMemory(c).csv) == 2);

  c = thetaConfig();
  c.experiment = "osss-check";
  c.lambdas = {0.4};
  c.ns = {3};
  c.k = 1;
  c.replicas = 30;
  CHECK(rows(runExperimentInMemory(c).csv) == 3);

  c = thetaConfig();
  c.experiment = "revealment";
  c.lambdas = {0.4};
  c.ns = {3};
  c.k = 1;
  c.replicas = 30;
  CHECK(rows(runExperimentInMemory(c).csv) == 41);  // |Lambda_{3+sqrt3}| axes

  c = thetaConfig();
  c.experiment = "renorm-independence";
  c.lambdas = {0.8};
  c.capN = 2;
  c.replicas = 100;
  CHECK(rows(runExperimentInMemory(c).csv) == 3);

  c = thetaConfig();
  c.experiment = "renorm-tail";
  c.lambdas = {0.4};
  c.capN = 2;
  c.sizes = {1, 2};
  c.replicas = 100;
  CHECK(rows(runExperimentInMemory(c).csv) == 3);  // sizes + summary
}

TEST_CASE("adjacent replica indicator streams are uncorrelated") {
  const CrossingEvaluator eval(2, 2, 0.5);
  const SpaceTimeWindow window = eval.window();
  const long R = 4000;
  std::vector<double> ind(static_cast<std::size_t>(R + 1));
  for (long i = 0; i <= R; ++i) {
    RandomStream stream(seedFor(99, static_cast<std::uint64_t>(i)));
    const auto cfg = samplePoints(window, stream);
    ind[static_cast<std::size_t>(i)] = eval.indicator(cfg, marksFor(cfg, 0.6)) ? 1.0 : 0.0;
  }
  double mean = 0;
  for (long i = 0; i <= R; ++i) mean += ind[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(R + 1);
  double num = 0, den = 0;
  for (long i = 0; i < R; ++i) {
    num += (ind[static_cast<std::size_t>(i)] - mean) * (ind[static_cast<std::size_t>(i + 1)] - mean);
    den += (ind[static_cast<std::size_t>(i)] - mean) * (ind[static_cast<std::size_t>(i)] - mean);
  }
  const double corr = den > 0 ? num / den : 0.0;
  CHECK(std::abs(corr) <= 3.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("CLI exit codes: success 0, validation 2") {
  CHECK(runCli("--experiment theta-curve --lambda 0.5 --n 1 --replicas 20 "
               "--seed 3 --workers 1 --out cli_smoke.csv > /dev/null 2>&1") == 0);
  std::ifstream csv("cli_smoke.csv");
  CHECK(csv.good());
  std::ifstream sidecar("cli_smoke.csv.json");
  CHECK(sidecar.good());

  CHECK(runCli("--experiment theta-curve --lambda 0.5 --n 1 --replicas 0 "
               "--out cli_bad.csv 2> /dev/null") == 2);
  CHECK(runCli("--experiment bogus --lambda 0.5 --n 1 --replicas 5 "
               "--out cli_bad.csv 2> /dev/null") == 2);
}

TEST_CASE("CLI config file with flag overrides") {
  {
    std::ofstream f("cli_config.json");
    f << R"({"experiment":"theta-curve","lambda":0.5,"n":1,"replicas":25,"seed":4,)"
      << R"("workers":1,"out":"cli_from_file.csv"})";
  }
  CHECK(runCli("--config cli_config.json > /dev/null 2>&1") == 0);
  CHECK(runCli("--config cli_config.json --out cli_override.csv > /dev/null 2>&1") == 0);
  std::ifstream overridden("cli_override.csv");
  CHECK(overridden.good());
}

TEST_CASE("CLI replays a result sidecar to the identical CSV body") {
  REQUIRE(runCli("--experiment theta-curve --lambda 0.6 --n-list 1,2 --replicas 50 "
                 "--seed 21 --workers 1 --out cli_orig.csv > /dev/null 2>&1") == 0);
  REQUIRE(runCli("--config cli_orig.csv.json --out cli_replay.csv > /dev/null 2>&1") == 0);
  auto slurp = [](const char* path) {
    std::ifstream f(path);
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return csvWithoutWallTime(s);
  };
  CHECK(slurp("cli_orig.csv") == slurp("cli_replay.csv"));
}
