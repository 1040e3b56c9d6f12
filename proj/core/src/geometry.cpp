#include "xkm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace xkm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DimensionError: return "DimensionError";
    case ErrorCode::TreeInvariantViolation: return "TreeInvariantViolation";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::TerminationCapExceeded: return "TerminationCapExceeded";
    case ErrorCode::DegenerateInstance: return "DegenerateInstance";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

void check_finite(PointView p) {
  for (double v : p) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, "non-finite coordinate");
    }
  }
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorCode::EmptyInput, std::string(what) + " is empty");
}

}  // namespace

PointMatrix::PointMatrix(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::DimensionError, "dimension must be positive");
}

PointMatrix::PointMatrix(std::size_t dim, std::vector<double> flat)
    : dim_(dim), coords_(std::move(flat)) {
  if (dim == 0) throw Error(ErrorCode::DimensionError, "dimension must be positive");
  if (coords_.size() % dim != 0) {
    throw Error(ErrorCode::DimensionError, "flat storage is not a multiple of the dimension");
  }
  check_finite(coords_);
}

PointMatrix::PointMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  for (const auto& r : rows) push_back(PointView(r.begin(), r.size()));
}

PointMatrix::PointMatrix(const std::vector<Point>& rows) {
  for (const auto& r : rows) push_back(r);
}

void PointMatrix::push_back(PointView p) {
  if (dim_ == 0) {
    if (p.empty()) throw Error(ErrorCode::DimensionError, "point has no coordinates");
    dim_ = p.size();
  } else if (p.size() != dim_) {
    throw Error(ErrorCode::DimensionError,
                "point has " + std::to_string(p.size()) + " coordinates, expected " +
                    std::to_string(dim_));
  }
  check_finite(p);
  coords_.insert(coords_.end(), p.begin(), p.end());
}

Point PointMatrix::to_point(std::size_t i) const {
  auto v = (*this)[i];
  return {v.begin(), v.end()};
}

std::vector<std::size_t> CenterSet::distinct_indices() const {
  // Lexicographic map keyed by coordinates keeps the first (lowest) index.
  std::map<std::vector<double>, std::size_t> seen;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    auto [it, inserted] = seen.emplace(to_point(i), i);
    if (inserted) out.push_back(i);
  }
  return out;
}

void require_finite(const PointMatrix& m, const char* what) {
  for (double v : m.flat()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::InvalidParameter, std::string(what) + " has a non-finite coordinate");
    }
  }
}

void require_same_dim(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::DimensionError, std::string(what) + ": dimension " +
                                               std::to_string(actual) + " != " +
                                               std::to_string(expected));
  }
}

double squared_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

double distance(PointView a, PointView b) { return std::sqrt(squared_distance(a, b)); }

namespace {

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  return idx;
}

}  // namespace

Point coordinate_median(const CenterSet& centers) {
  return coordinate_median(centers, all_indices(centers.size()));
}

Point coordinate_median(const CenterSet& centers, std::span<const std::size_t> subset) {
  require_nonempty(subset.size(), "center set");
  const std::size_t d = centers.dim();
  const std::size_t pos = (subset.size() - 1) / 2;
  Point m(d);
  std::vector<double> column(subset.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t r = 0; r < subset.size(); ++r) column[r] = centers[subset[r]][j];
    std::nth_element(column.begin(), column.begin() + static_cast<std::ptrdiff_t>(pos),
                     column.end());
    m[j] = column[pos];
  }
  return m;
}

double radius(const CenterSet& centers, PointView m) {
  return radius(centers, all_indices(centers.size()), m);
}

double radius(const CenterSet& centers, std::span<const std::size_t> subset, PointView m) {
  require_same_dim(centers.dim(), m.size(), "radius");
  double best = 0.0;
  for (std::size_t i : subset) best = std::max(best, squared_distance(centers[i], m));
  return std::sqrt(best);
}

double diameter(const CenterSet& centers) {
  return diameter(centers, all_indices(centers.size()));
}

double diameter(const CenterSet& centers, std::span<const std::size_t> subset) {
  require_nonempty(subset.size(), "center set");
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      best = std::max(best, squared_distance(centers[subset[a]], centers[subset[b]]));
    }
  }
  return std::sqrt(best);
}

Nearest nearest_center(PointView x, const CenterSet& centers) {
  require_nonempty(centers.size(), "center set");
  require_same_dim(centers.dim(), x.size(), "nearest_center");
  Nearest best{0, squared_distance(x, centers[0])};
  for (std::size_t i = 1; i < centers.size(); ++i) {
    const double s = squared_distance(x, centers[i]);
    if (s < best.sq_dist) best = {i, s};
  }
  return best;
}

ClusterAssignment assign(const Dataset& data, const CenterSet& centers) {
  require_nonempty(centers.size(), "center set");
  if (!data.empty()) require_same_dim(centers.dim(), data.dim(), "assign");
  ClusterAssignment out;
  out.assignment.resize(data.size());
  for (std::size_t p = 0; p < data.size(); ++p) {
    const auto n = nearest_center(data[p], centers);
    out.assignment[p] = n.index;
    out.cost += n.sq_dist;
  }
  return out;
}

double clustering_cost(const Dataset& data, const CenterSet& centers) {
  return assign(data, centers).cost;
}

double assignment_cost(const Dataset& data, const CenterSet& centers,
                       std::span<const std::size_t> assignment) {
  if (assignment.size() != data.size()) {
    throw Error(ErrorCode::DimensionError, "assignment length differs from dataset size");
  }
  double cost = 0.0;
  for (std::size_t p = 0; p < data.size(); ++p) {
    if (assignment[p] >= centers.size()) {
      throw Error(ErrorCode::InvalidParameter, "assignment index out of range");
    }
    cost += squared_distance(data[p], centers[assignment[p]]);
  }
  return cost;
}

Point centroid(const Dataset& data) { return centroid(data, all_indices(data.size())); }

Point centroid(const Dataset& data, std::span<const std::size_t> subset) {
  require_nonempty(subset.size(), "point subset");
  Point c(data.dim(), 0.0);
  for (std::size_t p : subset) {
    auto x = data[p];
    for (std::size_t j = 0; j < c.size(); ++j) c[j] += x[j];
  }
  const auto n = static_cast<double>(subset.size());
  for (double& v : c) v /= n;
  return c;
}

}  // namespace xkm
