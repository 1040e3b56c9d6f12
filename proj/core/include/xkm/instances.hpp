#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "xkm/geometry.hpp"

namespace xkm {

/// Parameters of the grid lower-bound family. Without overrides:
/// d = 300 ceil(ln k), grid step eps = 50 delta / ceil(ln k), and
/// k^2 ceil((ln k)^3) copies of every center.
struct HardInstanceSpec {
  std::size_t k = 2;
  double delta = 0.01;
  std::optional<std::size_t> dim_override;
  std::optional<std::size_t> multiplicity_override;
  std::uint64_t seed = 0;
  /// Regenerate the centers until every pair is at least sqrt(d)/5 apart.
  bool strict = false;
  std::size_t max_attempts = 100;
};

struct InstanceMetadata {
  std::size_t k = 0;
  std::size_t d = 0;
  double step = 0.0;  // grid step; 0 for Gaussian mixtures
  std::size_t multiplicity = 0;
  bool dim_overridden = false;
  bool multiplicity_overridden = false;
  std::size_t attempts = 1;
};

struct GeneratedInstance {
  Dataset points;
  CenterSet planted_centers;
  double planted_cost = 0.0;
  InstanceMetadata metadata;
};

std::size_t canonical_dimension(std::size_t k);
double grid_step(std::size_t k, double delta);
std::size_t canonical_multiplicity(std::size_t k);

/// Every center sits on a grid node {0, eps, 2 eps, ...}^d inside the unit
/// cube; X holds `multiplicity` copies of each center plus c + eps(1..1) and
/// c - eps(1..1).
GeneratedInstance gen_lower_bound_instance(const HardInstanceSpec& spec);

/// 2 k d eps^2: the planted cost when every special point is nearest to its
/// own center.
double planted_cost_formula(std::size_t k, std::size_t d, double step);

double min_pairwise_distance(const CenterSet& centers);

/// True when every pair of centers is at least sqrt(d)/5 apart.
bool centers_well_separated(const CenterSet& centers);

/// k centers uniform in [0, center_box]^d with n_per_cluster isotropic
/// Gaussian points around each.
GeneratedInstance gen_gaussian_mixture(std::size_t k, std::size_t d, std::size_t n_per_cluster,
                                       double center_box, double noise_sigma,
                                       std::uint64_t seed);

}  // namespace xkm
