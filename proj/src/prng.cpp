#include "soficlab/prng.hpp"

#include <stdexcept>

namespace soficlab {

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_below(0)");
  }
  // rejection below the largest multiple of n
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % n;
}

std::vector<std::uint32_t> random_permutation(Rng& rng, std::size_t d) {
  std::vector<std::uint32_t> image(d);
  for (std::size_t i = 0; i < d; ++i) {
    image[i] = static_cast<std::uint32_t>(i);
  }
  for (std::size_t i = d; i > 1; --i) {
    const std::uint64_t j = uniform_below(rng, i);
    std::swap(image[i - 1], image[j]);
  }
  return image;
}

std::vector<std::uint32_t> random_image(Rng& rng, std::size_t d) {
  std::vector<std::uint32_t> image(d);
  for (std::size_t i = 0; i < d; ++i) {
    image[i] = static_cast<std::uint32_t>(uniform_below(rng, d));
  }
  return image;
}

Rng stream_for_index(std::uint64_t seed, std::uint64_t index) {
  // splitmix-style scramble so neighbouring indices decorrelate
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return Rng(z);
}

}  // namespace soficlab
