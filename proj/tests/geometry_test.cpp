#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "xkm/geometry.hpp"

using namespace xkm;

namespace {

CenterSet random_centers(std::mt19937_64& rng, std::size_t n, std::size_t d, bool lattice) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::uniform_int_distribution<int> g(-2, 2);
  CenterSet c(d);
  Point p(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : p) v = lattice ? g(rng) : u(rng);
    c.push_back(p);
  }
  return c;
}

}  // namespace

TEST(CoordinateMedian, Examples) {
  EXPECT_EQ(coordinate_median(CenterSet{{0, 0}, {10, 0}, {0, 10}}), (Point{0, 0}));
  EXPECT_EQ(coordinate_median(CenterSet{{5, 5}}), (Point{5, 5}));
  EXPECT_EQ(coordinate_median(CenterSet{{1}, {3}}), (Point{1}));
}

TEST(CoordinateMedian, EmptyThrows) {
  CenterSet empty(2);
  try {
    coordinate_median(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

// At most floor(n/2) centers strictly on either side, in every coordinate.
// Lattice draws force many duplicate coordinate values.
TEST(CoordinateMedian, HalfPropertyRandom) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 17;
    const std::size_t d = 1 + trial % 4;
    const auto c = random_centers(rng, n, d, trial % 2 == 0);
    const auto m = coordinate_median(c);
    for (std::size_t j = 0; j < d; ++j) {
      std::size_t below = 0, above = 0;
      for (std::size_t i = 0; i < n; ++i) {
        below += c[i][j] < m[j];
        above += c[i][j] > m[j];
      }
      ASSERT_LE(below, n / 2);
      ASSERT_LE(above, n / 2);
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    ASSERT_EQ(m, oracle::sorted_median(c, all));
  }
}

TEST(Radius, Examples) {
  EXPECT_DOUBLE_EQ(radius(CenterSet{{0, 0}, {10, 0}, {0, 10}}, Point{0, 0}), 10.0);
  EXPECT_DOUBLE_EQ(radius(CenterSet{{5, 5}}, Point{5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(radius(CenterSet{{1}, {3}}, Point{1}), 2.0);
}

TEST(Radius, DimensionMismatch) {
  try {
    radius(CenterSet{{1, 2}}, Point{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionError);
  }
}

TEST(Diameter, Examples) {
  EXPECT_NEAR(diameter(CenterSet{{0, 0}, {10, 0}, {0, 10}}), 14.142135623730951, 1e-12);
  EXPECT_DOUBLE_EQ(diameter(CenterSet{{5, 5}}), 0.0);
  EXPECT_DOUBLE_EQ(diameter(CenterSet{{0}, {1}, {2}}), 2.0);
  EXPECT_THROW(diameter(CenterSet(3)), Error);
}

TEST(Diameter, RadiusSandwichRandom) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto c = random_centers(rng, 2 + trial % 30, 1 + trial % 6, trial % 3 == 0);
    const auto m = coordinate_median(c);
    const double R = radius(c, m);
    const double D = diameter(c);
    ASSERT_LE(R / std::sqrt(2.0), D * (1 + 1e-9));
    ASSERT_LE(D, 2 * R * (1 + 1e-9));
  }
}

TEST(NearestCenter, Examples) {
  const CenterSet c{{1, 0}, {5, 0}};
  auto n = nearest_center(Point{0, 0}, c);
  EXPECT_EQ(n.index, 0u);
  EXPECT_DOUBLE_EQ(n.sq_dist, 1.0);

  n = nearest_center(c[1], c);
  EXPECT_EQ(n.index, 1u);
  EXPECT_DOUBLE_EQ(n.sq_dist, 0.0);

  n = nearest_center(Point{3, 0}, c);
  EXPECT_EQ(n.index, 0u);  // equidistant: lowest index
  EXPECT_DOUBLE_EQ(n.sq_dist, 4.0);

  EXPECT_THROW(nearest_center(Point{0, 0}, CenterSet(2)), Error);
}

TEST(ClusteringCost, Examples) {
  EXPECT_DOUBLE_EQ(clustering_cost(Dataset{{0, 0}, {2, 0}}, CenterSet{{1, 0}}), 2.0);
  EXPECT_DOUBLE_EQ(clustering_cost(Dataset{{1, 2}, {3, 4}}, CenterSet{{1, 2}, {3, 4}}), 0.0);
  const Dataset x{{0, 0}, {2, 0}, {3, 0}};
  const CenterSet c{{0, 0}, {3, 0}};
  const auto a = assign(x, c);
  EXPECT_EQ(a.assignment, (std::vector<std::size_t>{0, 1, 1}));
  EXPECT_DOUBLE_EQ(a.cost, 1.0);
}

TEST(ClusteringCost, MatchesBruteForceAndAssignment) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + trial % 2, n = 1 + trial % 6, k = 1 + trial % 3;
    Dataset x(d);
    CenterSet c(d);
    Point p(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : p) v = u(rng);
      x.push_back(p);
    }
    for (std::size_t i = 0; i < k; ++i) {
      for (auto& v : p) v = u(rng);
      c.push_back(p);
    }
    const auto a = assign(x, c);
    ASSERT_TRUE(oracle::rel_close(a.cost, oracle::brute_force_clustering_cost(x, c), 1e-12));
    ASSERT_TRUE(oracle::rel_close(a.cost, assignment_cost(x, c, a.assignment), 1e-12));
  }
}

TEST(Centroid, Examples) {
  EXPECT_EQ(centroid(Dataset{{0, 0}, {2, 0}}), (Point{1, 0}));
  EXPECT_EQ(centroid(Dataset{{-7.25}}), (Point{-7.25}));
  EXPECT_EQ(centroid(Dataset{{0}, {1}, {5}}), (Point{2}));
  EXPECT_THROW(centroid(Dataset(1)), Error);
}

TEST(PointMatrix, RejectsRaggedAndNonFinite) {
  CenterSet c(2);
  EXPECT_THROW(c.push_back(Point{1.0}), Error);
  EXPECT_THROW(c.push_back(Point{1.0, NAN}), Error);
  EXPECT_THROW(c.push_back(Point{INFINITY, 0.0}), Error);
}

TEST(CenterSet, DistinctIndicesKeepLowest) {
  const CenterSet c{{0, 0}, {9, 9}, {0, 0}, {1, 1}, {9, 9}};
  EXPECT_EQ(c.distinct_indices(), (std::vector<std::size_t>{0, 1, 3}));
}
