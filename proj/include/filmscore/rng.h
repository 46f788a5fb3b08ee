#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace filmscore {

/// Deterministic random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions below are implemented here rather than taken
/// from <random> because the standard leaves those implementation-defined,
/// and all generation must reproduce bit-for-bit across toolchains.
///
/// Substreams are keyed by a purpose string and an index, so adding a new
/// consumer never shifts the numbers another consumer sees.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Independent generator for (purpose, index), derived from this seed only.
  Rng substream(std::string_view purpose, std::uint64_t index = 0) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();
  bool chance(double p) { return uniform01() < p; }
  /// Index drawn with probability proportional to integer weights.
  std::size_t weighted_index(std::span<const std::uint64_t> weights);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// SplitMix64 finaliser; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace filmscore
