#include "xkm/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "xkm/random.hpp"

namespace xkm {

namespace {

std::size_t ceil_ln(std::size_t k) {
  return static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(k))));
}

CenterSet sample_grid_centers(std::size_t k, std::size_t d, double step, std::size_t nodes,
                              std::uint64_t seed) {
  Engine rng(seed);
  std::uniform_int_distribution<std::size_t> node(0, nodes - 1);
  std::set<std::vector<std::size_t>> used;
  CenterSet centers(d);
  centers.reserve(k);
  std::vector<std::size_t> idx(d);
  Point c(d);
  while (centers.size() < k) {
    for (std::size_t j = 0; j < d; ++j) idx[j] = node(rng);
    if (!used.insert(idx).second) continue;
    for (std::size_t j = 0; j < d; ++j) c[j] = static_cast<double>(idx[j]) * step;
    centers.push_back(c);
  }
  return centers;
}

}  // namespace

std::size_t canonical_dimension(std::size_t k) { return 300 * ceil_ln(k); }

double grid_step(std::size_t k, double delta) {
  return 50.0 * delta / static_cast<double>(ceil_ln(k));
}

std::size_t canonical_multiplicity(std::size_t k) {
  const double ln = std::log(static_cast<double>(k));
  return k * k * static_cast<std::size_t>(std::ceil(ln * ln * ln));
}

double planted_cost_formula(std::size_t k, std::size_t d, double step) {
  return 2.0 * static_cast<double>(k) * static_cast<double>(d) * step * step;
}

GeneratedInstance gen_lower_bound_instance(const HardInstanceSpec& spec) {
  if (spec.k < 2) throw Error(ErrorCode::InvalidParameter, "hard instance needs k > 1");
  if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "delta must lie in (0, 1)");
  }
  if (spec.dim_override && *spec.dim_override == 0) {
    throw Error(ErrorCode::InvalidParameter, "dimension override must be positive");
  }
  if (spec.multiplicity_override && *spec.multiplicity_override == 0) {
    throw Error(ErrorCode::InvalidParameter, "multiplicity override must be positive");
  }

  const double step = grid_step(spec.k, spec.delta);
  if (step > 1.0) {
    throw Error(ErrorCode::InvalidParameter,
                "grid step " + std::to_string(step) + " exceeds the unit cube");
  }
  const std::size_t d = spec.dim_override.value_or(canonical_dimension(spec.k));
  const std::size_t multiplicity =
      spec.multiplicity_override.value_or(canonical_multiplicity(spec.k));
  // Nodes per axis: 0, step, ..., floor(1/step) * step.
  const auto nodes = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9)) + 1;
  if (static_cast<double>(d) * std::log(static_cast<double>(nodes)) <
      std::log(static_cast<double>(spec.k))) {
    throw Error(ErrorCode::InvalidParameter, "grid too coarse to host k distinct centers");
  }

  GeneratedInstance out;
  out.metadata = {spec.k, d, step, multiplicity, spec.dim_override.has_value(),
                  spec.multiplicity_override.has_value(), 0};

  const std::size_t attempts = spec.strict ? std::max<std::size_t>(spec.max_attempts, 1) : 1;
  for (std::size_t a = 0; a < attempts; ++a) {
    out.planted_centers = sample_grid_centers(spec.k, d, step, nodes, derive_seed(spec.seed, a));
    out.metadata.attempts = a + 1;
    if (!spec.strict || centers_well_separated(out.planted_centers)) break;
    if (a + 1 == attempts) {
      throw Error(ErrorCode::DegenerateInstance,
                  "no well-separated center set after " + std::to_string(attempts) + " attempts");
    }
  }

  out.points = Dataset(d);
  out.points.reserve(spec.k * (multiplicity + 2));
  Point shifted(d);
  for (std::size_t i = 0; i < spec.k; ++i) {
    const auto c = out.planted_centers[i];
    for (std::size_t m = 0; m < multiplicity; ++m) out.points.push_back(c);
    for (double sign : {1.0, -1.0}) {
      for (std::size_t j = 0; j < d; ++j) shifted[j] = c[j] + sign * step;
      out.points.push_back(shifted);
    }
  }
  out.planted_cost = clustering_cost(out.points, out.planted_centers);
  return out;
}

double min_pairwise_distance(const CenterSet& centers) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      best = std::min(best, squared_distance(centers[a], centers[b]));
    }
  }
  return std::sqrt(best);
}

bool centers_well_separated(const CenterSet& centers) {
  return min_pairwise_distance(centers) >= std::sqrt(static_cast<double>(centers.dim())) / 5.0;
}

GeneratedInstance gen_gaussian_mixture(std::size_t k, std::size_t d, std::size_t n_per_cluster,
                                       double center_box, double noise_sigma,
                                       std::uint64_t seed) {
  if (k == 0 || d == 0 || n_per_cluster == 0) {
    throw Error(ErrorCode::InvalidParameter, "k, d and n_per_cluster must be positive");
  }
  if (!(center_box > 0.0) || !std::isfinite(center_box)) {
    throw Error(ErrorCode::InvalidParameter, "center_box must be positive");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidParameter, "noise_sigma must be nonnegative");
  }

  Engine rng(seed);
  std::uniform_real_distribution<double> box(0.0, center_box);
  std::normal_distribution<double> noise(0.0, 1.0);

  GeneratedInstance out;
  out.planted_centers = CenterSet(d);
  Point c(d);
  for (std::size_t i = 0; i < k; ++i) {
    for (double& v : c) v = box(rng);
    out.planted_centers.push_back(c);
  }

  out.points = Dataset(d);
  out.points.reserve(k * n_per_cluster);
  Point x(d);
  for (std::size_t i = 0; i < k; ++i) {
    const auto center = out.planted_centers[i];
    for (std::size_t p = 0; p < n_per_cluster; ++p) {
      for (std::size_t j = 0; j < d; ++j) x[j] = center[j] + noise_sigma * noise(rng);
      out.points.push_back(x);
    }
  }
  out.planted_cost = clustering_cost(out.points, out.planted_centers);
  out.metadata = {k, d, 0.0, n_per_cluster, false, false, 1};
  return out;
}

}  // namespace xkm
