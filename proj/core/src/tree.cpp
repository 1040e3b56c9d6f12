#include "xkm/tree.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>

namespace xkm {

namespace {

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::TreeInvariantViolation, "malformed tree: " + why);
}

}  // namespace

ThresholdTree ThresholdTree::single_leaf(std::size_t center_index, Point center) {
  return ThresholdTree({LeafNode{center_index, std::move(center), std::nullopt}});
}

std::vector<NodeId> ThresholdTree::leaves() const {
  std::vector<NodeId> out;
  if (nodes_.empty()) return out;
  std::vector<NodeId> stack{0};
  std::size_t visited = 0;
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (id >= nodes_.size()) malformed("child index out of range");
    if (++visited > nodes_.size()) malformed("cycle detected");
    if (const auto* in = std::get_if<InternalNode>(&nodes_[id])) {
      stack.push_back(in->right);
      stack.push_back(in->left);
    } else {
      out.push_back(id);
    }
  }
  return out;
}

std::size_t ThresholdTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<NodeId, std::size_t>> stack{{0, 0}};
  std::size_t visited = 0;
  while (!stack.empty()) {
    auto [id, level] = stack.back();
    stack.pop_back();
    if (id >= nodes_.size()) malformed("child index out of range");
    if (++visited > nodes_.size()) malformed("cycle detected");
    best = std::max(best, level);
    if (const auto* in = std::get_if<InternalNode>(&nodes_[id])) {
      stack.emplace_back(in->left, level + 1);
      stack.emplace_back(in->right, level + 1);
    }
  }
  return best;
}

std::vector<std::size_t> ThresholdTree::distinct_center_indices() const {
  std::set<std::size_t> seen;
  for (NodeId id : leaves()) seen.insert(leaf(id).center_index);
  return {seen.begin(), seen.end()};
}

ThresholdTree preorder(const ThresholdTree& tree, std::vector<NodeId>* old_to_new) {
  std::vector<NodeId> order;
  order.reserve(tree.node_count());
  std::vector<NodeId> mapping(tree.node_count(), tree.node_count());
  std::vector<NodeId> stack;
  if (!tree.empty()) stack.push_back(0);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    if (id >= tree.node_count()) malformed("child index out of range");
    if (mapping[id] != tree.node_count()) malformed("node reached twice");
    mapping[id] = order.size();
    order.push_back(id);
    if (const auto* in = std::get_if<InternalNode>(&tree.node(id))) {
      stack.push_back(in->right);
      stack.push_back(in->left);
    }
  }
  std::vector<TreeNode> nodes;
  nodes.reserve(order.size());
  for (NodeId id : order) {
    TreeNode n = tree.node(id);
    if (auto* in = std::get_if<InternalNode>(&n)) {
      in->left = mapping[in->left];
      in->right = mapping[in->right];
    }
    nodes.push_back(std::move(n));
  }
  if (old_to_new) *old_to_new = std::move(mapping);
  return ThresholdTree(std::move(nodes));
}

RouteResult route(const ThresholdTree& tree, PointView x) {
  if (tree.empty()) malformed("no nodes");
  NodeId id = 0;
  for (std::size_t hops = 0; hops <= tree.node_count(); ++hops) {
    if (id >= tree.node_count()) malformed("child index out of range");
    const TreeNode& n = tree.node(id);
    if (const auto* leaf = std::get_if<LeafNode>(&n)) return {id, leaf->center_index};
    const auto& in = std::get<InternalNode>(n);
    if (in.cut.dim >= x.size()) {
      throw Error(ErrorCode::DimensionError,
                  "cut dimension " + std::to_string(in.cut.dim) + " exceeds point dimension");
    }
    id = in.cut.goes_left(x) ? in.left : in.right;
  }
  malformed("cycle detected");
}

std::vector<NodeId> route_all(const ThresholdTree& tree, const Dataset& data) {
  std::vector<NodeId> out(data.size());
  for (std::size_t p = 0; p < data.size(); ++p) out[p] = route(tree, data[p]).leaf;
  return out;
}

double tree_cost(const Dataset& data, const ThresholdTree& tree, const CenterSet& centers) {
  double cost = 0.0;
  for (std::size_t p = 0; p < data.size(); ++p) {
    const auto r = route(tree, data[p]);
    const LeafNode& leaf = tree.leaf(r.leaf);
    if (leaf.refined_center) {
      require_same_dim(data.dim(), leaf.refined_center->size(), "refined center");
      cost += squared_distance(data[p], *leaf.refined_center);
      continue;
    }
    if (r.center_index >= centers.size()) {
      malformed("leaf center index " + std::to_string(r.center_index) + " out of range");
    }
    require_same_dim(centers.dim(), data.dim(), "tree_cost");
    cost += squared_distance(data[p], centers[r.center_index]);
  }
  return cost;
}

}  // namespace xkm
