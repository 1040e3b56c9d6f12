#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "xkm/geometry.hpp"

namespace xkm {

/// Axis-aligned split: points with x[dim] <= threshold go left.
struct ThresholdCut {
  std::size_t dim = 0;
  double threshold = 0.0;

  bool goes_left(PointView x) const noexcept { return x[dim] <= threshold; }
  friend bool operator==(const ThresholdCut&, const ThresholdCut&) = default;
};

using NodeId = std::size_t;

struct InternalNode {
  ThresholdCut cut;
  NodeId left = 0;
  NodeId right = 0;
  friend bool operator==(const InternalNode&, const InternalNode&) = default;
};

struct LeafNode {
  std::size_t center_index = 0;
  Point original_center;
  std::optional<Point> refined_center;

  /// The point this leaf assigns to routed data.
  const Point& effective_center() const noexcept {
    return refined_center ? *refined_center : original_center;
  }
  friend bool operator==(const LeafNode&, const LeafNode&) = default;
};

using TreeNode = std::variant<InternalNode, LeafNode>;

/// Binary threshold tree stored as a flat node array. Node 0 is the root.
class ThresholdTree {
 public:
  ThresholdTree() = default;
  explicit ThresholdTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  static ThresholdTree single_leaf(std::size_t center_index, Point center);

  std::size_t node_count() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  TreeNode& node(NodeId id) { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

  bool is_leaf(NodeId id) const { return std::holds_alternative<LeafNode>(node(id)); }
  const LeafNode& leaf(NodeId id) const { return std::get<LeafNode>(node(id)); }
  LeafNode& leaf(NodeId id) { return std::get<LeafNode>(node(id)); }

  NodeId add_node(TreeNode n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  /// Leaf ids in depth-first, left-before-right order.
  std::vector<NodeId> leaves() const;
  std::size_t leaf_count() const { return leaves().size(); }
  std::size_t depth() const;
  std::vector<std::size_t> distinct_center_indices() const;

  friend bool operator==(const ThresholdTree&, const ThresholdTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct RouteResult {
  NodeId leaf;
  std::size_t center_index;
};

/// Follows cuts from the root; throws TreeInvariantViolation on a malformed tree.
RouteResult route(const ThresholdTree& tree, PointView x);

/// Sum over points of the squared distance to the routed leaf's center. A
/// refined center wins over centers[center_index] when present.
double tree_cost(const Dataset& data, const ThresholdTree& tree, const CenterSet& centers);

/// Renumbers nodes in pre-order (node, left subtree, right subtree). When
/// `old_to_new` is given it receives the id mapping.
ThresholdTree preorder(const ThresholdTree& tree, std::vector<NodeId>* old_to_new = nullptr);

/// Per-point leaf ids.
std::vector<NodeId> route_all(const ThresholdTree& tree, const Dataset& data);

}  // namespace xkm
