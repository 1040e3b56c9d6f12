#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xkm/builder.hpp"
#include "xkm/geometry.hpp"
#include "xkm/tree.hpp"

namespace xkm {

struct TreeReport {
  std::size_t leaf_count = 0;
  std::size_t distinct_center_count = 0;
  std::size_t depth = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Structural audit. Violations are reported, never thrown. The partition
/// property is probed with random points and with points on and just past
/// every threshold: each probe must satisfy the path predicates of exactly one
/// leaf, and that leaf must be the one route() reaches.
TreeReport validate_tree(const ThresholdTree& tree, const CenterSet& centers,
                         std::uint64_t probe_seed = 0, std::size_t random_probes = 256);

struct ExperimentStats {
  std::size_t trials = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  double ci95_half_width = 0.0;
  std::vector<double> values;

  double stderr_mean() const noexcept;
  double median() const;
};

ExperimentStats summarize(std::vector<double> values);

/// Counters accumulated while auditing builds.
struct AuditCounts {
  std::size_t trees = 0;
  std::size_t tree_violations = 0;
  std::size_t sandwich_nodes = 0;
  std::size_t sandwich_violations = 0;
  std::size_t cost_sandwich_violations = 0;
  std::size_t refinement_increases = 0;
  std::size_t nonfinite_ratios = 0;

  AuditCounts& operator+=(const AuditCounts& o);
  std::size_t total_violations() const noexcept {
    return tree_violations + sandwich_violations + cost_sandwich_violations +
           refinement_increases + nonfinite_ratios;
  }
};

/// Counts nodes in a recorded trace and those where R/sqrt(2) <= D <= 2R fails.
std::pair<std::size_t, std::size_t> audit_sandwich(const BuildTrace& trace,
                                                   double rel_tol = 1e-9);

struct LeavesExperiment {
  ExperimentStats stats;
  double bound = 0.0;  // (1 + delta) k
  bool flag_raised = false;
  AuditCounts audit;
};

/// Builds `trials` trees with seeds derive_seed(master_seed, t) and records
/// their leaf counts. The flag fires when mean - 3 stderr > (1 + delta) k,
/// with k the number of distinct centers.
LeavesExperiment expected_leaves_experiment(const CenterSet& centers, double delta,
                                            std::size_t trials, std::uint64_t master_seed);

struct SeparationExperiment {
  ExperimentStats stats;  // per-trial 0/1 separation indicators
  double bound = 0.0;     // 1 / (128 d)
  bool flag_raised = false;
  std::size_t first = 0;
  std::size_t second = 0;
  double pair_distance = 0.0;
  double diameter = 0.0;
};

/// One-step separation frequency of the farthest pair of the root node. A pair
/// is separated when no child of a successful split holds both.
SeparationExperiment separation_frequency_experiment(const CenterSet& centers,
                                                     std::size_t trials,
                                                     std::uint64_t master_seed,
                                                     double eps = 1.0 / 320.0);

/// Same, for a caller-chosen pair. Refuses pairs closer than half the diameter.
SeparationExperiment separation_frequency_experiment(const CenterSet& centers,
                                                     std::pair<std::size_t, std::size_t> pair,
                                                     std::size_t trials,
                                                     std::uint64_t master_seed,
                                                     double eps = 1.0 / 320.0);

/// tree_cost / clustering_cost against the reference centers. Throws
/// DegenerateInstance when the reference cost is zero.
double competitive_ratio(const Dataset& data, const ThresholdTree& tree,
                         const CenterSet& ref_centers);

struct SweepConfig {
  std::vector<std::size_t> ks{10, 50, 100};
  std::vector<double> deltas{0.1, 0.2, 0.5};
  std::size_t d = 10;
  std::size_t n_per_cluster = 20;
  double center_box = 10.0;
  double noise_sigma = 1.0;
  std::size_t lloyd_iters = 25;
  std::size_t trials = 200;
  std::uint64_t master_seed = 0;
};

struct SweepRow {
  std::size_t k = 0;
  double delta = 0.0;
  std::size_t d = 0;
  double ref_cost = 0.0;
  LeavesExperiment leaves;
  ExperimentStats distinct_centers;
  ExperimentStats ratio;          // before refinement
  ExperimentStats refined_ratio;  // after refine_centroids
  ExperimentStats runtime_ms;
};

/// For each (k, delta): Gaussian-mixture data, k-means++ plus Lloyd reference
/// centers, then `trials` audited builds. Rows are ordered k-major.
std::vector<SweepRow> ratio_sweep(const SweepConfig& config);

}  // namespace xkm
