#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "xkm/geometry.hpp"

namespace xkm {

struct SeedConfig {
  std::size_t k = 1;
  std::uint64_t seed = 0;
  std::size_t lloyd_iters = 0;
  double lloyd_tol = 0.0;
};

struct SeedResult {
  CenterSet centers;
  std::vector<std::size_t> chosen;  // row of X behind each center
  /// Set when X ran out of positive-distance points and later picks repeat
  /// existing centers.
  bool has_duplicates = false;
};

/// D^2 sampling: first center uniform over X, then each next center with
/// probability proportional to its squared distance from the current set.
SeedResult kmeanspp_seed(const Dataset& data, const SeedConfig& cfg);

struct LloydResult {
  CenterSet centers;
  std::vector<double> cost_history;  // cost of the initial centers, then after each round
  std::size_t rounds = 0;
};

/// Alternating assignment / centroid update. Empty clusters keep their
/// previous center. Stops after cfg.lloyd_iters rounds or once the relative
/// cost improvement drops below cfg.lloyd_tol.
LloydResult lloyd(const Dataset& data, CenterSet centers, const SeedConfig& cfg);

/// kmeanspp_seed followed by lloyd.
CenterSet seed_centers(const Dataset& data, const SeedConfig& cfg);

}  // namespace xkm
