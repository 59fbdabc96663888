#include "strategic/rng.hpp"

namespace strategic {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::string_view label) {
  const std::uint64_t base = mix64(master ^ mix64(label_hash(label)));
  return mix64(base + index * 0x9E3779B97F4A7C15ULL);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(derive_seed(key_, stream, "split"));
}

}  // namespace strategic
