#include "xkm/seeding.hpp"

#include <algorithm>
#include <numeric>

#include "xkm/random.hpp"

namespace xkm {

SeedResult kmeanspp_seed(const Dataset& data, const SeedConfig& cfg) {
  if (cfg.k < 1) throw Error(ErrorCode::InvalidParameter, "k must be at least 1");
  if (data.empty()) throw Error(ErrorCode::EmptyInput, "dataset is empty");

  Engine rng(cfg.seed);
  const std::size_t n = data.size();
  SeedResult out;
  out.centers = CenterSet(data.dim());
  out.centers.reserve(cfg.k);

  auto pick = [&](std::size_t p) {
    out.chosen.push_back(p);
    out.centers.push_back(data[p]);
  };

  pick(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));

  std::vector<double> dist2(n);
  for (std::size_t p = 0; p < n; ++p) dist2[p] = squared_distance(data[p], out.centers[0]);

  std::vector<double> cumulative(n);
  while (out.centers.size() < cfg.k) {
    std::partial_sum(dist2.begin(), dist2.end(), cumulative.begin());
    const double total = cumulative.back();
    std::size_t next = 0;
    if (total > 0.0) {
      const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      // First index whose cumulative mass exceeds u; zero-mass points are never hit.
      next = static_cast<std::size_t>(
          std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      if (next >= n) next = n - 1;
      while (dist2[next] == 0.0 && next > 0) --next;
    } else {
      out.has_duplicates = true;
      next = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    pick(next);
    const auto c = out.centers[out.centers.size() - 1];
    for (std::size_t p = 0; p < n; ++p) dist2[p] = std::min(dist2[p], squared_distance(data[p], c));
  }
  return out;
}

LloydResult lloyd(const Dataset& data, CenterSet centers, const SeedConfig& cfg) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  if (!data.empty()) require_same_dim(centers.dim(), data.dim(), "lloyd");

  LloydResult out;
  auto current = assign(data, centers);
  out.cost_history.push_back(current.cost);

  const std::size_t d = centers.dim();
  const std::size_t k = centers.size();
  auto previous_assignment = current.assignment;
  for (std::size_t round = 0; round < cfg.lloyd_iters; ++round) {
    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t p = 0; p < data.size(); ++p) {
      const std::size_t c = current.assignment[p];
      ++counts[c];
      auto x = data[p];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += x[j];
    }
    CenterSet updated = centers;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      auto row = updated.row(c);
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = sums[c * d + j] / static_cast<double>(counts[c]);
      }
    }

    auto next = assign(data, updated);
    const double prev = current.cost;
    // Keep the old centers if rounding made the update worse.
    if (next.cost > prev) break;
    centers = std::move(updated);
    current = std::move(next);
    out.cost_history.push_back(current.cost);
    ++out.rounds;
    if (current.assignment == previous_assignment) break;
    previous_assignment = current.assignment;
    if (prev <= 0.0 || (prev - current.cost) / prev < cfg.lloyd_tol) break;
  }
  out.centers = std::move(centers);
  return out;
}

CenterSet seed_centers(const Dataset& data, const SeedConfig& cfg) {
  auto seeded = kmeanspp_seed(data, cfg);
  if (cfg.lloyd_iters == 0) return std::move(seeded.centers);
  return lloyd(data, std::move(seeded.centers), cfg).centers;
}

}  // namespace xkm
