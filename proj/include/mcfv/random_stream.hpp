#pragma once

#include <cstdint>
#include <random>

namespace mcfv {

/// SplitMix64 finalizer. Used to derive independent generator seeds from
/// (master seed, sample index) without a shared sequential stream.
std::uint64_t splitmix64(std::uint64_t x);

/// Source of standard normal variates for one Monte Carlo sample.
///
/// The stream for sample `index` depends only on (master_seed, index), so
/// samples may be generated in any order or on any thread.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t index);

  double normal() { return normal_(engine_); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mcfv
