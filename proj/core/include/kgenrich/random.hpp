#pragma once
// Seed derivation. Every random stream in the project is derived from one
// root seed plus a purpose tag (and optionally an index), so that streams are
// independent of evaluation order and thread count.

#include <cstdint>
#include <random>
#include <string_view>

namespace kgenrich {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view purpose,
                                    std::uint64_t index = 0) {
  return splitmix64(splitmix64(root ^ fnv1a64(purpose)) + index);
}

inline Rng make_rng(std::uint64_t root, std::string_view purpose, std::uint64_t index = 0) {
  return Rng(derive_seed(root, purpose, index));
}

}  // namespace kgenrich
