#include "xkm/random.hpp"

namespace xkm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

double uniform_open_unit(Engine& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double v = 0.0;
  while (v == 0.0) v = unit(rng);
  return v;
}

}  // namespace xkm
