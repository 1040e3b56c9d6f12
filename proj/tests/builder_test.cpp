#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "xkm/builder.hpp"
#include "xkm/eval.hpp"

using namespace xkm;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::ParseError;
}

CenterSet random_centers(std::uint64_t seed, std::size_t k, std::size_t d) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  CenterSet c(d);
  Point p(d);
  for (std::size_t i = 0; i < k; ++i) {
    for (auto& v : p) v = u(rng);
    c.push_back(p);
  }
  return c;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(EpsilonParam, Examples) {
  EXPECT_NEAR(epsilon_param(100, 0.1), 0.0014476482730108394, 1e-15);
  EXPECT_DOUBLE_EQ(epsilon_param(2, 0.9), 1.0 / 320.0);
  EXPECT_DOUBLE_EQ(epsilon_param(1, 0.37), 1.0 / 320.0);
}

TEST(EpsilonParam, RejectsDeltaOutsideUnitInterval) {
  for (double bad : {0.0, 1.0, 1.5, -0.2}) {
    EXPECT_EQ(code_of([&] { epsilon_param(5, bad); }), ErrorCode::InvalidParameter);
  }
}

TEST(DivideAndShare, CleanSplit) {
  const CenterSet c{{0, 0}, {10, 0}};
  const auto out = divide_and_share(c, iota(2), StepDraw{0, 0.25, +1}, 0.1);
  ASSERT_TRUE(is_split(out));
  const auto& s = std::get<Split>(out);
  EXPECT_EQ(s.cut, (ThresholdCut{0, 5.0}));
  EXPECT_EQ(s.left, (std::vector<std::size_t>{0}));
  EXPECT_EQ(s.right, (std::vector<std::size_t>{1}));
}

TEST(DivideAndShare, EmptyLeftFails) {
  const CenterSet c{{0, 0}, {10, 0}};
  const auto out = divide_and_share(c, iota(2), StepDraw{0, 0.25, -1}, 0.1);
  EXPECT_FALSE(is_split(out));
}

TEST(DivideAndShare, StripSharesCenter) {
  const CenterSet c{{0, 0}, {10, 0}};
  const auto out = divide_and_share(c, iota(2), StepDraw{0, 0.9603, +1}, 0.1);
  ASSERT_TRUE(is_split(out));
  const auto& s = std::get<Split>(out);
  EXPECT_NEAR(s.cut.threshold, 9.799489782636645, 1e-12);
  EXPECT_EQ(s.left, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.right, (std::vector<std::size_t>{1}));
}

TEST(DivideAndShare, NeedsTwoDistinctCenters) {
  const CenterSet same{{1, 1}, {1, 1}};
  EXPECT_EQ(code_of([&] { divide_and_share(same, iota(2), StepDraw{0, 0.5, 1}, 0.1); }),
            ErrorCode::InvalidNode);
  const CenterSet one{{1, 1}};
  EXPECT_EQ(code_of([&] { divide_and_share(one, iota(1), StepDraw{0, 0.5, 1}, 0.1); }),
            ErrorCode::InvalidNode);
}

TEST(DivideAndShare, LeavesInputUntouched) {
  const CenterSet c = random_centers(3, 6, 2);
  const CenterSet copy = c;
  divide_and_share(c, iota(6), StepDraw{1, 0.3, -1}, 0.003);
  EXPECT_EQ(c, copy);
}

// Union is the node, intersection is exactly the strip, and a child never has
// a larger diameter than its parent. Outcomes match the set-comprehension oracle.
TEST(DivideAndShare, SplitInvariantsRandom) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + trial % 12, d = 1 + trial % 4;
    const auto c = random_centers(trial, k, d);
    const auto node = iota(k);
    const StepDraw draw = sample_step(rng, d);
    const double eps = trial % 2 ? 1.0 / 320.0 : 0.2;
    const auto out = divide_and_share(c, node, draw, eps);
    const auto expect = oracle::set_comprehension_split(c, node, draw, eps);
    ASSERT_EQ(is_split(out), expect.ok);
    if (!expect.ok) continue;
    const auto& s = std::get<Split>(out);
    ASSERT_EQ(s.left, expect.left);
    ASSERT_EQ(s.right, expect.right);
    ASSERT_EQ(s.cut.threshold, expect.cut);

    const auto g = node_geometry(c, node);
    const double half = eps * std::sqrt(draw.theta) * g.radius;
    std::set<std::size_t> uni(s.left.begin(), s.left.end());
    uni.insert(s.right.begin(), s.right.end());
    ASSERT_EQ(uni.size(), k);
    for (std::size_t i : node) {
      const bool in_both = std::count(s.left.begin(), s.left.end(), i) &&
                           std::count(s.right.begin(), s.right.end(), i);
      const double v = c[i][draw.dim];
      const bool in_strip = v >= s.cut.threshold - half && v <= s.cut.threshold + half;
      // Boundary rounding aside, sharing is exactly strip membership.
      if (std::abs(std::abs(v - s.cut.threshold) - half) > 1e-12) {
        ASSERT_EQ(in_both, in_strip);
      }
    }
    ASSERT_LE(diameter(c, s.left), diameter(c, node));
    ASSERT_LE(diameter(c, s.right), diameter(c, node));
  }
}

TEST(BuildTree, SingleCenter) {
  const auto r = build_tree(CenterSet{{3, 4}}, BuildConfig{});
  EXPECT_EQ(r.tree.node_count(), 1u);
  EXPECT_EQ(r.tree.leaf(0).center_index, 0u);
  EXPECT_EQ(r.steps, 0u);
}

TEST(BuildTree, TwoCentersOneDimension) {
  const CenterSet c{{0}, {10}};
  BuildConfig cfg;
  cfg.delta = 0.5;
  cfg.seed = 7;
  const auto r = build_tree(c, cfg);
  const auto report = validate_tree(r.tree, c);
  EXPECT_TRUE(report.ok());
  EXPECT_EQ(r.tree.distinct_center_indices(), (std::vector<std::size_t>{0, 1}));
}

TEST(BuildTree, CoincidentCentersCollapse) {
  const CenterSet dup{{0, 0}, {0, 0}, {9, 9}};
  const CenterSet dedup{{0, 0}, {9, 9}};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BuildConfig cfg;
    cfg.seed = seed;
    const auto a = build_tree(dup, cfg).tree;
    const auto b = build_tree(dedup, cfg).tree;
    ASSERT_EQ(a.node_count(), b.node_count());
    for (NodeId id = 0; id < a.node_count(); ++id) {
      if (a.is_leaf(id)) {
        ASSERT_TRUE(b.is_leaf(id));
        const std::size_t relabeled = a.leaf(id).center_index == 2 ? 1 : 0;
        ASSERT_EQ(relabeled, b.leaf(id).center_index);
      } else {
        ASSERT_EQ(std::get<InternalNode>(a.node(id)), std::get<InternalNode>(b.node(id)));
      }
    }
  }
}

TEST(BuildTree, AllCoincidentIsSingleLeaf) {
  const auto r = build_tree(CenterSet{{2, 2}, {2, 2}, {2, 2}}, BuildConfig{});
  EXPECT_EQ(r.tree.node_count(), 1u);
  EXPECT_EQ(r.tree.leaf(0).center_index, 0u);
}

TEST(BuildTree, EmptyCentersThrow) {
  EXPECT_EQ(code_of([] { build_tree(CenterSet(2), BuildConfig{}); }), ErrorCode::EmptyInput);
}

TEST(BuildTree, DeterministicAndReplayable) {
  const auto c = random_centers(4, 25, 3);
  BuildConfig cfg;
  cfg.delta = 0.3;
  cfg.seed = 1234;
  cfg.record_trace = true;
  const auto a = build_tree(c, cfg);
  const auto b = build_tree(c, cfg);
  EXPECT_EQ(a.tree, b.tree);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(a.trace.steps.size(), a.steps);
  EXPECT_EQ(replay_trace(c, cfg.delta, a.trace), a.tree);

  cfg.seed = 1235;
  EXPECT_NE(build_tree(c, cfg).tree, a.tree);
}

TEST(BuildTree, LeavesHaveOneCenterAndValidLabels) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto c = random_centers(seed, 2 + seed % 40, 1 + seed % 5);
    BuildConfig cfg;
    cfg.seed = seed;
    cfg.delta = 0.5;
    cfg.record_trace = true;
    const auto r = build_tree(c, cfg);
    const auto labels = r.tree.distinct_center_indices();
    ASSERT_EQ(labels.size(), c.size());  // continuous draws: all distinct, all reach a leaf
    for (NodeId id : r.tree.leaves()) {
      ASSERT_LT(r.tree.leaf(id).center_index, c.size());
      ASSERT_EQ(r.tree.leaf(id).original_center, c.to_point(r.tree.leaf(id).center_index));
    }
    ASSERT_EQ(r.trace.sandwich_violations, 0u);
    ASSERT_TRUE(validate_tree(r.tree, c, seed).ok());
  }
}

// Every step applies one shared draw to all active nodes.
TEST(BuildTree, TraceSharesDrawAcrossNodes) {
  const auto c = random_centers(77, 40, 2);
  BuildConfig cfg;
  cfg.seed = 5;
  cfg.record_trace = true;
  const auto r = build_tree(c, cfg);
  Engine rng(cfg.seed);
  std::size_t multi = 0;
  for (const auto& step : r.trace.steps) {
    ASSERT_EQ(step.draw, sample_step(rng, c.dim()));
    ASSERT_FALSE(step.nodes.empty());
    multi += step.nodes.size() > 1;
  }
  EXPECT_GT(multi, 0u);
}

TEST(BuildTree, CapExceededCarriesPartialTrace) {
  const auto c = random_centers(9, 30, 4);
  BuildConfig cfg;
  cfg.seed = 2;
  cfg.max_steps = 3;
  cfg.record_trace = true;
  try {
    build_tree(c, cfg);
    FAIL();
  } catch (const TerminationCapExceeded& e) {
    EXPECT_EQ(e.code(), ErrorCode::TerminationCapExceeded);
    EXPECT_EQ(e.partial_trace().steps.size(), 3u);
  }
}

TEST(BuildTree, DefaultCap) {
  EXPECT_EQ(default_max_steps(10, 3), 200u * 3 * 3 * 10);
}

TEST(RefineCentroids, Examples) {
  auto t = ThresholdTree::single_leaf(0, {10, 10});
  t = refine_centroids(t, Dataset{{0, 0}, {2, 0}});
  ASSERT_TRUE(t.leaf(0).refined_center);
  EXPECT_EQ(*t.leaf(0).refined_center, (Point{1, 0}));

  const CenterSet c{{0}, {10}};
  const ThresholdTree two({InternalNode{{0, 5.0}, 1, 2}, LeafNode{0, {0}, std::nullopt},
                           LeafNode{1, {10}, std::nullopt}});
  const auto same = refine_centroids(two, Dataset{{0}, {10}});
  EXPECT_EQ(*same.leaf(1).refined_center, (Point{0}));
  EXPECT_EQ(*same.leaf(2).refined_center, (Point{10}));

  const auto one = ThresholdTree::single_leaf(0, {0});
  const Dataset x{{0}, {4}};
  EXPECT_DOUBLE_EQ(tree_cost(x, one, CenterSet{{0}}), 16.0);
  EXPECT_DOUBLE_EQ(tree_cost(x, refine_centroids(one, x), CenterSet{{0}}), 8.0);
}

TEST(RefineCentroids, EmptyLeafKeepsCenter) {
  const ThresholdTree two({InternalNode{{0, 5.0}, 1, 2}, LeafNode{0, {0}, std::nullopt},
                           LeafNode{1, {10}, std::nullopt}});
  const auto r = refine_centroids(two, Dataset{{1}, {3}});
  EXPECT_EQ(*r.leaf(1).refined_center, (Point{2}));
  EXPECT_FALSE(r.leaf(2).refined_center);
  EXPECT_EQ(r.leaf(2).effective_center(), (Point{10}));
}

TEST(RefineCentroids, NeverIncreasesCost) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 2.0);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto c = random_centers(seed, 8, 2);
    Dataset x(2);
    for (int i = 0; i < 200; ++i) {
      const auto base = c[i % 8];
      x.push_back(Point{base[0] + noise(rng), base[1] + noise(rng)});
    }
    BuildConfig cfg;
    cfg.seed = seed;
    const auto t = build_tree(c, cfg).tree;
    ASSERT_LE(tree_cost(x, refine_centroids(t, x), c), tree_cost(x, t, c) * (1 + 1e-12));
  }
}
