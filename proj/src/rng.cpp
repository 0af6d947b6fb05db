#include "fishpath/rng.hpp"

namespace fishpath::rng {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::uint64_t k = mix64(seed + 0x9E3779B97F4A7C15ULL);
  k = mix64(k ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
  k = mix64(k ^ (index + 0x8CB92BA72F3D8DD7ULL));
  return k;
}

}  // namespace fishpath::rng
