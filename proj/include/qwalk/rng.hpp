#pragma once

#include <cstdint>
#include <random>

namespace qwalk {

/// Reproducible random stream.
///
/// Each (seed, stream) pair is expanded through SplitMix64 into the seed
/// sequence of a std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Doubles are formed from the top 53 bits, integers by rejection,
/// so no implementation-defined distribution is involved.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace qwalk
