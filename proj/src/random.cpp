#include "cplab/random.hpp"

#include <cmath>

namespace cplab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) {
    x = splitmix64(x);
    s = x;
  }
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

std::uint64_t RandomStream::nextUInt64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RandomStream::uniform01() { return static_cast<double>(nextUInt64() >> 11) * 0x1.0p-53; }

double RandomStream::exponential() {
  // Offset keeps the uniform strictly inside (0,1) so the gap is finite
  // and strictly positive (event times stay distinct).
  const double u = (static_cast<double>(nextUInt64() >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

std::uint32_t RandomStream::uniformInt(std::uint32_t bound) {
  return static_cast<std::uint32_t>(nextUInt64() % bound);
}

std::uint64_t seedFor(std::uint64_t masterSeed, std::uint64_t replicaIndex) {
  // masterSeed ^ (odd * (replicaIndex + c)) is injective in replicaIndex and
  // splitmix64 is a bijection, so seeds never collide within one master.
  return splitmix64(masterSeed ^ (0x9e3779b97f4a7c15ULL * (replicaIndex + 0x3c79ac492ba7b653ULL)));
}

std::uint64_t substream(std::uint64_t masterSeed, std::uint64_t tag) {
  return splitmix64(masterSeed + 0xd1342543de82ef95ULL * (tag + 1));
}

}  // namespace cplab
