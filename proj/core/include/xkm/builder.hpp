#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "xkm/geometry.hpp"
#include "xkm/random.hpp"
#include "xkm/tree.hpp"

namespace xkm {

struct BuildConfig {
  double delta = 0.1;
  std::uint64_t seed = 0;
  /// Unset means default_max_steps(k, d).
  std::optional<std::size_t> max_steps;
  bool record_trace = false;
};

/// One global draw shared by every active leaf in a step.
struct StepDraw {
  std::size_t dim = 0;
  double theta = 0.5;  // in (0, 1)
  int sigma = 1;       // +1 or -1
  friend bool operator==(const StepDraw&, const StepDraw&) = default;
};

struct SplitFailure {
  friend bool operator==(const SplitFailure&, const SplitFailure&) = default;
};

struct Split {
  ThresholdCut cut;
  std::vector<std::size_t> left;   // centers with c[i] <= xi + strip
  std::vector<std::size_t> right;  // centers with c[i] >= xi - strip
  friend bool operator==(const Split&, const Split&) = default;
};

using SplitOutcome = std::variant<SplitFailure, Split>;

inline bool is_split(const SplitOutcome& o) noexcept { return std::holds_alternative<Split>(o); }

struct NodeGeometry {
  Point median;
  double radius = 0.0;
};

NodeGeometry node_geometry(const CenterSet& centers, std::span<const std::size_t> node);

/// min(delta / (15 ln k), 1/320); 1/320 when k == 1.
double epsilon_param(std::size_t k, double delta);

std::size_t default_max_steps(std::size_t k, std::size_t d);

StepDraw sample_step(Engine& rng, std::size_t d);

/// Splits a node's centers around xi = m[i] + sigma sqrt(theta) R. Centers
/// within eps sqrt(theta) R of xi go to both children. Fails when either side
/// is empty. Throws InvalidNode when the node has fewer than two distinct
/// centers.
SplitOutcome divide_and_share(const CenterSet& centers, std::span<const std::size_t> node,
                              const StepDraw& draw, double eps);
SplitOutcome divide_and_share(const CenterSet& centers, std::span<const std::size_t> node,
                              const NodeGeometry& geometry, const StepDraw& draw, double eps);

struct NodeRecord {
  NodeId node = 0;
  std::size_t center_count = 0;
  Point median;
  double radius = 0.0;
  double diameter = 0.0;
  SplitOutcome outcome;
  NodeId left_child = 0;   // valid only on Split
  NodeId right_child = 0;  // valid only on Split
};

struct StepRecord {
  std::size_t step = 0;
  StepDraw draw;
  std::vector<NodeRecord> nodes;
};

struct BuildTrace {
  std::vector<StepRecord> steps;
  /// Nodes where R/sqrt(2) <= D <= 2R failed at relative tolerance 1e-9.
  std::size_t sandwich_violations = 0;
};

struct BuildResult {
  ThresholdTree tree;
  BuildTrace trace;
  std::size_t steps = 0;
};

class TerminationCapExceeded : public Error {
 public:
  TerminationCapExceeded(std::size_t cap, BuildTrace partial)
      : Error(ErrorCode::TerminationCapExceeded,
              "tree construction exceeded " + std::to_string(cap) + " steps"),
        partial_(std::move(partial)) {}

  const BuildTrace& partial_trace() const noexcept { return partial_; }

 private:
  BuildTrace partial_;
};

/// Grows a threshold tree over the distinct centers until every leaf holds a
/// single one. Coincident centers collapse to their lowest index, and k in the
/// epsilon formula counts distinct centers.
BuildResult build_tree(const CenterSet& centers, const BuildConfig& config);

/// Rebuilds the tree from the draws recorded in `trace` instead of the RNG.
ThresholdTree replay_trace(const CenterSet& centers, double delta, const BuildTrace& trace);

/// Replaces each non-empty leaf's center with the centroid of its routed points.
ThresholdTree refine_centroids(ThresholdTree tree, const Dataset& data);

bool sandwich_holds(double radius, double diameter, double rel_tol = 1e-9) noexcept;

}  // namespace xkm
