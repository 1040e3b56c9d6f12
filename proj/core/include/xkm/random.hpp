#pragma once

#include <cstdint>
#include <random>

namespace xkm {

/// All randomized routines draw from a 64-bit Mersenne Twister seeded with a
/// caller-supplied value; nothing reads ambient entropy.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` under `master`:
/// splitmix64(master ^ splitmix64(stream + 0x9E3779B97F4A7C15)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Uniform on the open interval (0, 1).
double uniform_open_unit(Engine& rng);

}  // namespace xkm
