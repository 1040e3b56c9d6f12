#include "xkm/builder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace xkm {

double epsilon_param(std::size_t k, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "delta must lie in (0, 1)");
  }
  if (k == 0) throw Error(ErrorCode::InvalidParameter, "k must be positive");
  constexpr double cap = 1.0 / 320.0;
  if (k == 1) return cap;
  return std::min(delta / (15.0 * std::log(static_cast<double>(k))), cap);
}

std::size_t default_max_steps(std::size_t k, std::size_t d) {
  const auto log_term =
      static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(k) + 1.0)));
  return 200 * std::max<std::size_t>(d, 1) * std::max<std::size_t>(log_term, 1) *
         std::max<std::size_t>(k, 1);
}

StepDraw sample_step(Engine& rng, std::size_t d) {
  StepDraw draw;
  draw.dim = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
  draw.theta = uniform_open_unit(rng);
  draw.sigma = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return draw;
}

NodeGeometry node_geometry(const CenterSet& centers, std::span<const std::size_t> node) {
  NodeGeometry g;
  g.median = coordinate_median(centers, node);
  g.radius = radius(centers, node, g.median);
  return g;
}

SplitOutcome divide_and_share(const CenterSet& centers, std::span<const std::size_t> node,
                              const StepDraw& draw, double eps) {
  if (node.empty()) throw Error(ErrorCode::InvalidNode, "node has no centers");
  return divide_and_share(centers, node, node_geometry(centers, node), draw, eps);
}

SplitOutcome divide_and_share(const CenterSet& centers, std::span<const std::size_t> node,
                              const NodeGeometry& geometry, const StepDraw& draw, double eps) {
  // R == 0 exactly when every center coincides with the median.
  if (node.size() < 2 || !(geometry.radius > 0.0)) {
    throw Error(ErrorCode::InvalidNode, "node needs at least two distinct centers");
  }
  if (draw.dim >= centers.dim()) {
    throw Error(ErrorCode::DimensionError, "draw coordinate out of range");
  }
  if (!(draw.theta > 0.0 && draw.theta < 1.0) || (draw.sigma != 1 && draw.sigma != -1)) {
    throw Error(ErrorCode::InvalidParameter, "draw outside (0,1) x {+1,-1}");
  }

  const std::size_t i = draw.dim;
  const double root_theta = std::sqrt(draw.theta);
  const double m = geometry.median[i];
  const double r = geometry.radius;
  const double cut = m + draw.sigma * root_theta * r;
  const double left_limit = m + draw.sigma * root_theta * r + eps * root_theta * r;
  const double right_limit = m + draw.sigma * root_theta * r - eps * root_theta * r;

  Split split;
  split.cut = {i, cut};
  for (std::size_t c : node) {
    const double v = centers[c][i];
    if (v <= left_limit) split.left.push_back(c);
    if (v >= right_limit) split.right.push_back(c);
  }
  if (split.left.empty() || split.right.empty()) return SplitFailure{};
  return split;
}

bool sandwich_holds(double radius, double diameter, double rel_tol) noexcept {
  const double slack = 1.0 + rel_tol;
  return radius / std::sqrt(2.0) <= diameter * slack && diameter <= 2.0 * radius * slack;
}

namespace {

using DrawSource = std::function<StepDraw(std::size_t step)>;

struct ActiveNode {
  NodeId id;
  std::vector<std::size_t> centers;
  NodeGeometry geometry;
  double diameter = 0.0;
};

/// Shared construction loop; `next_draw` supplies one draw per step.
BuildResult grow(const CenterSet& centers, double eps, const DrawSource& next_draw,
                 std::size_t max_steps, bool record) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  require_finite(centers, "center set");

  BuildResult result;
  const auto distinct = centers.distinct_indices();

  auto make_leaf = [&](std::size_t c) {
    return LeafNode{c, centers.to_point(c), std::nullopt};
  };

  std::vector<TreeNode> nodes;
  nodes.emplace_back(make_leaf(distinct.front()));
  ThresholdTree tree(std::move(nodes));

  auto activate = [&](NodeId id, std::vector<std::size_t> subset) {
    ActiveNode a{id, std::move(subset), {}, 0.0};
    a.geometry = node_geometry(centers, a.centers);
    if (record) {
      a.diameter = diameter(centers, a.centers);
      if (!sandwich_holds(a.geometry.radius, a.diameter)) ++result.trace.sandwich_violations;
    }
    return a;
  };

  // Subsets only ever hold distinct representatives, so size >= 2 means the
  // node still has two distinct centers.
  std::vector<ActiveNode> active;
  if (distinct.size() >= 2) active.push_back(activate(0, distinct));

  std::size_t step = 0;
  while (!active.empty()) {
    if (step >= max_steps) {
      throw TerminationCapExceeded(max_steps, std::move(result.trace));
    }
    const StepDraw draw = next_draw(step);
    StepRecord rec;
    if (record) {
      rec.step = step;
      rec.draw = draw;
    }

    std::vector<ActiveNode> next;
    for (ActiveNode& node : active) {
      SplitOutcome outcome = divide_and_share(centers, node.centers, node.geometry, draw, eps);
      NodeRecord nr;
      if (record) {
        nr.node = node.id;
        nr.center_count = node.centers.size();
        nr.median = node.geometry.median;
        nr.radius = node.geometry.radius;
        nr.diameter = node.diameter;
      }
      if (auto* split = std::get_if<Split>(&outcome)) {
        const NodeId left = tree.add_node(make_leaf(split->left.front()));
        const NodeId right = tree.add_node(make_leaf(split->right.front()));
        tree.node(node.id) = InternalNode{split->cut, left, right};
        if (split->left.size() >= 2) next.push_back(activate(left, split->left));
        if (split->right.size() >= 2) next.push_back(activate(right, split->right));
        nr.left_child = left;
        nr.right_child = right;
      } else {
        next.push_back(std::move(node));
      }
      if (record) {
        nr.outcome = std::move(outcome);
        rec.nodes.push_back(std::move(nr));
      }
    }
    if (record) result.trace.steps.push_back(std::move(rec));
    active = std::move(next);
    ++step;
  }

  // Renumber to pre-order so a tree equals its own save/load round trip.
  std::vector<NodeId> mapping;
  result.tree = preorder(tree, &mapping);
  for (auto& rec : result.trace.steps) {
    for (auto& nr : rec.nodes) {
      nr.node = mapping[nr.node];
      if (is_split(nr.outcome)) {
        nr.left_child = mapping[nr.left_child];
        nr.right_child = mapping[nr.right_child];
      }
    }
  }
  result.steps = step;
  return result;
}

}  // namespace

BuildResult build_tree(const CenterSet& centers, const BuildConfig& config) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  const std::size_t k = centers.distinct_indices().size();
  const double eps = epsilon_param(k, config.delta);
  const std::size_t cap = config.max_steps.value_or(default_max_steps(k, centers.dim()));
  if (cap == 0) throw Error(ErrorCode::InvalidParameter, "max_steps must be positive");

  Engine rng(config.seed);
  const std::size_t d = centers.dim();
  return grow(
      centers, eps, [&](std::size_t) { return sample_step(rng, d); }, cap,
      config.record_trace);
}

ThresholdTree replay_trace(const CenterSet& centers, double delta, const BuildTrace& trace) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  const double eps = epsilon_param(centers.distinct_indices().size(), delta);
  auto next = [&](std::size_t step) {
    if (step >= trace.steps.size()) {
      throw Error(ErrorCode::InvalidParameter, "trace ended before the tree was complete");
    }
    return trace.steps[step].draw;
  };
  return grow(centers, eps, next, trace.steps.size(), false).tree;
}

ThresholdTree refine_centroids(ThresholdTree tree, const Dataset& data) {
  if (data.empty()) return tree;
  std::vector<std::vector<std::size_t>> members(tree.node_count());
  for (std::size_t p = 0; p < data.size(); ++p) members[route(tree, data[p]).leaf].push_back(p);
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    if (members[id].empty()) continue;
    tree.leaf(id).refined_center = centroid(data, members[id]);
  }
  return tree;
}

}  // namespace xkm
