#pragma once

// Test-only reference implementations. They share no code paths with the
// library beyond the plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "xkm/builder.hpp"
#include "xkm/geometry.hpp"
#include "xkm/tree.hpp"

namespace xkm::oracle {

inline double sq(double v) { return v * v; }

inline double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += sq(a[j] - b[j]);
  return s;
}

inline std::vector<std::vector<double>> rows(const PointMatrix& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.size(); ++i) out.push_back(m.to_point(i));
  return out;
}

/// Minimum over all k^n assignments of the summed squared distance.
inline double brute_force_clustering_cost(const Dataset& data, const CenterSet& centers) {
  const auto xs = rows(data);
  const auto cs = rows(centers);
  const std::size_t n = xs.size(), k = cs.size();
  std::vector<std::size_t> a(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double cost = 0.0;
    for (std::size_t p = 0; p < n; ++p) cost += sq_dist(xs[p], cs[a[p]]);
    best = std::min(best, cost);
    std::size_t pos = 0;
    while (pos < n && ++a[pos] == k) a[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

/// Enumerates every leaf, keeps the one whose root path admits x, and sums
/// squared distances to that leaf's center.
inline double brute_force_tree_cost(const Dataset& data, const ThresholdTree& tree,
                                    const CenterSet& centers) {
  struct Frame {
    NodeId id;
    std::vector<std::pair<ThresholdCut, bool>> path;
  };
  std::vector<std::pair<NodeId, std::vector<std::pair<ThresholdCut, bool>>>> leaves;
  std::vector<Frame> stack{{0, {}}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (tree.is_leaf(f.id)) {
      leaves.emplace_back(f.id, f.path);
      continue;
    }
    const auto& in = std::get<InternalNode>(tree.node(f.id));
    auto l = f.path, r = f.path;
    l.emplace_back(in.cut, true);
    r.emplace_back(in.cut, false);
    stack.push_back({in.left, l});
    stack.push_back({in.right, r});
  }
  double cost = 0.0;
  for (const auto& x : rows(data)) {
    for (const auto& [id, path] : leaves) {
      bool inside = true;
      for (const auto& [cut, left] : path) inside = inside && ((x[cut.dim] <= cut.threshold) == left);
      if (!inside) continue;
      const auto& leaf = tree.leaf(id);
      const auto c = leaf.refined_center ? *leaf.refined_center : centers.to_point(leaf.center_index);
      cost += sq_dist(x, c);
    }
  }
  return cost;
}

/// Lower median via a full sort of each coordinate.
inline std::vector<double> sorted_median(const CenterSet& centers,
                                         const std::vector<std::size_t>& subset) {
  std::vector<double> m(centers.dim());
  for (std::size_t j = 0; j < centers.dim(); ++j) {
    std::vector<double> col;
    for (std::size_t c : subset) col.push_back(centers[c][j]);
    std::sort(col.begin(), col.end());
    m[j] = col[(col.size() - 1) / 2];
  }
  return m;
}

struct SplitSets {
  bool ok = false;
  double cut = 0.0;
  std::vector<std::size_t> left, right;
};

/// Left = {c : c_i <= m_i + s sqrt(t) R + e sqrt(t) R},
/// Right = {c : c_i >= m_i + s sqrt(t) R - e sqrt(t) R}.
inline SplitSets set_comprehension_split(const CenterSet& centers,
                                         const std::vector<std::size_t>& node,
                                         const StepDraw& draw, double eps) {
  const auto m = sorted_median(centers, node);
  double r2 = 0.0;
  for (std::size_t c : node) r2 = std::max(r2, sq_dist(centers.to_point(c), m));
  const double R = std::sqrt(r2);
  const std::size_t i = draw.dim;
  SplitSets s;
  s.cut = m[i] + draw.sigma * std::sqrt(draw.theta) * R;
  for (std::size_t c : node) {
    if (centers[c][i] <= m[i] + draw.sigma * std::sqrt(draw.theta) * R + eps * std::sqrt(draw.theta) * R) {
      s.left.push_back(c);
    }
    if (centers[c][i] >= m[i] + draw.sigma * std::sqrt(draw.theta) * R - eps * std::sqrt(draw.theta) * R) {
      s.right.push_back(c);
    }
  }
  s.ok = !s.left.empty() && !s.right.empty();
  return s;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace xkm::oracle
