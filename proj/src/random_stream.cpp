#include "mcfv/random_stream.hpp"

#include <array>

namespace mcfv {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t key = splitmix64(splitmix64(master_seed) ^ index);
  std::array<std::uint32_t, 8> words{};
  for (auto& w : words) {
    key = splitmix64(key);
    w = static_cast<std::uint32_t>(key >> 32);
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::uint64_t index)
    : engine_(make_engine(master_seed, index)) {}

}  // namespace mcfv
