#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xkm/error.hpp"

namespace xkm {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Row-major n x d block of finite coordinates. Dataset and CenterSet share
/// this storage but are distinct types so a data matrix cannot be passed
/// where reference centers are expected.
class PointMatrix {
 public:
  PointMatrix() = default;
  explicit PointMatrix(std::size_t dim);
  PointMatrix(std::size_t dim, std::vector<double> flat);
  PointMatrix(std::initializer_list<std::initializer_list<double>> rows);
  explicit PointMatrix(const std::vector<Point>& rows);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coords_.empty(); }

  PointView operator[](std::size_t i) const noexcept {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) noexcept {
    return {coords_.data() + i * dim_, dim_};
  }

  void push_back(PointView p);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  const std::vector<double>& flat() const noexcept { return coords_; }
  Point to_point(std::size_t i) const;

  friend bool operator==(const PointMatrix&, const PointMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

class Dataset : public PointMatrix {
 public:
  using PointMatrix::PointMatrix;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

class CenterSet : public PointMatrix {
 public:
  using PointMatrix::PointMatrix;
  friend bool operator==(const CenterSet&, const CenterSet&) = default;

  /// Lowest index of each group of coincident centers, ascending.
  std::vector<std::size_t> distinct_indices() const;
};

struct Nearest {
  std::size_t index;
  double sq_dist;
};

struct ClusterAssignment {
  std::vector<std::size_t> assignment;
  double cost = 0.0;
};

double squared_distance(PointView a, PointView b);
double distance(PointView a, PointView b);

/// Per-coordinate lower median: element floor((n-1)/2) of each sorted
/// coordinate column. At most floor(n/2) centers lie strictly on either side
/// in every coordinate.
Point coordinate_median(const CenterSet& centers);
Point coordinate_median(const CenterSet& centers, std::span<const std::size_t> subset);

double radius(const CenterSet& centers, PointView m);
double radius(const CenterSet& centers, std::span<const std::size_t> subset, PointView m);

double diameter(const CenterSet& centers);
double diameter(const CenterSet& centers, std::span<const std::size_t> subset);

/// Lowest index wins ties.
Nearest nearest_center(PointView x, const CenterSet& centers);

ClusterAssignment assign(const Dataset& data, const CenterSet& centers);
double clustering_cost(const Dataset& data, const CenterSet& centers);
double assignment_cost(const Dataset& data, const CenterSet& centers,
                       std::span<const std::size_t> assignment);

Point centroid(const Dataset& data);
Point centroid(const Dataset& data, std::span<const std::size_t> subset);

void require_finite(const PointMatrix& m, const char* what);
void require_same_dim(std::size_t expected, std::size_t actual, const char* what);

}  // namespace xkm
