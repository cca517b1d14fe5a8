#pragma once

#include <cstdint>

namespace cplab {

// Deterministic random stream (xoshiro256++ with splitmix64 seeding).
// Self-contained so that results are bit-identical across platforms and
// standard-library versions; replicas never share a stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t nextUInt64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  // Strictly positive exponential with mean 1.
  double exponential();

  // Uniform integer in [0, bound).
  std::uint32_t uniformInt(std::uint32_t bound);

 private:
  std::uint64_t s_[4];
};

// Injective replica seeding: distinct replicaIndex values always map to
// distinct stream seeds for a fixed masterSeed.
std::uint64_t seedFor(std::uint64_t masterSeed, std::uint64_t replicaIndex);

// Derives an independent master seed for a named sub-pool of an experiment.
std::uint64_t substream(std::uint64_t masterSeed, std::uint64_t tag);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cplab
