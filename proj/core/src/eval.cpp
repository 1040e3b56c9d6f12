#include "xkm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "xkm/instances.hpp"
#include "xkm/random.hpp"
#include "xkm/seeding.hpp"

namespace xkm {

// ---------------------------------------------------------------------------
// Tree validation

namespace {

struct PathStep {
  ThresholdCut cut;
  bool left;
};

bool satisfies(const std::vector<PathStep>& path, PointView x) {
  return std::all_of(path.begin(), path.end(),
                     [&](const PathStep& s) { return s.cut.goes_left(x) == s.left; });
}

}  // namespace

TreeReport validate_tree(const ThresholdTree& tree, const CenterSet& centers,
                         std::uint64_t probe_seed, std::size_t random_probes) {
  TreeReport report;
  auto violation = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  if (tree.empty()) {
    violation("tree has no nodes");
    return report;
  }
  const std::size_t d = centers.dim();

  // Walk from the root, collecting leaf paths; each node must be reached once.
  std::vector<int> seen(tree.node_count(), 0);
  std::vector<std::pair<NodeId, std::vector<PathStep>>> leaf_paths;
  std::vector<std::pair<NodeId, std::vector<PathStep>>> stack{{0, {}}};
  std::vector<ThresholdCut> cuts;
  bool structural_ok = true;
  while (!stack.empty()) {
    auto [id, path] = std::move(stack.back());
    stack.pop_back();
    if (id >= tree.node_count()) {
      violation("child index " + std::to_string(id) + " out of range");
      structural_ok = false;
      continue;
    }
    if (seen[id]++ > 0) {
      violation("node " + std::to_string(id) + " reached more than once");
      structural_ok = false;
      continue;
    }
    report.depth = std::max(report.depth, path.size());
    const TreeNode& node = tree.node(id);
    if (const auto* in = std::get_if<InternalNode>(&node)) {
      if (in->cut.dim >= d) {
        violation("node " + std::to_string(id) + " cuts coordinate " +
                  std::to_string(in->cut.dim) + " of a " + std::to_string(d) + "-d space");
        structural_ok = false;
        continue;
      }
      if (!std::isfinite(in->cut.threshold)) {
        violation("node " + std::to_string(id) + " has a non-finite threshold");
      }
      cuts.push_back(in->cut);
      auto right = path;
      path.push_back({in->cut, true});
      right.push_back({in->cut, false});
      stack.emplace_back(in->right, std::move(right));
      stack.emplace_back(in->left, std::move(path));
    } else {
      const auto& leaf = std::get<LeafNode>(node);
      if (leaf.center_index >= centers.size()) {
        violation("leaf " + std::to_string(id) + " references center " +
                  std::to_string(leaf.center_index) + " of " + std::to_string(centers.size()));
      }
      if (leaf.original_center.size() != d) {
        violation("leaf " + std::to_string(id) + " center has wrong dimension");
      }
      if (leaf.refined_center && leaf.refined_center->size() != d) {
        violation("leaf " + std::to_string(id) + " refined center has wrong dimension");
      }
      leaf_paths.emplace_back(id, std::move(path));
    }
  }
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    if (seen[id] == 0) violation("node " + std::to_string(id) + " unreachable from root");
  }

  report.leaf_count = leaf_paths.size();
  std::set<std::size_t> distinct;
  for (const auto& [id, path] : leaf_paths) distinct.insert(tree.leaf(id).center_index);
  report.distinct_center_count = distinct.size();
  if (report.distinct_center_count > centers.size()) {
    violation("more distinct leaf centers than reference centers");
  }
  if (!structural_ok || centers.empty()) return report;

  // Probe the partition.
  Point lo(d, std::numeric_limits<double>::infinity());
  Point hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      lo[j] = std::min(lo[j], centers[c][j]);
      hi[j] = std::max(hi[j], centers[c][j]);
    }
  }
  for (const auto& cut : cuts) {
    lo[cut.dim] = std::min(lo[cut.dim], cut.threshold);
    hi[cut.dim] = std::max(hi[cut.dim], cut.threshold);
  }

  std::vector<Point> probes;
  Engine rng(probe_seed);
  for (std::size_t p = 0; p < random_probes; ++p) {
    Point x(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double span = hi[j] - lo[j];
      const double pad = span > 0.0 ? 0.1 * span : 1.0;
      x[j] = std::uniform_real_distribution<double>(lo[j] - pad, hi[j] + pad)(rng);
    }
    probes.push_back(std::move(x));
  }
  for (const auto& cut : cuts) {
    Point on = centers.to_point(0);
    on[cut.dim] = cut.threshold;
    Point past = on;
    past[cut.dim] = std::nextafter(cut.threshold, std::numeric_limits<double>::infinity());
    probes.push_back(std::move(on));
    probes.push_back(std::move(past));
  }

  std::size_t bad_probes = 0;
  for (const auto& x : probes) {
    std::size_t matches = 0;
    NodeId matched = 0;
    for (const auto& [id, path] : leaf_paths) {
      if (satisfies(path, x)) {
        ++matches;
        matched = id;
      }
    }
    if (matches != 1 || route(tree, x).leaf != matched) ++bad_probes;
  }
  if (bad_probes > 0) {
    violation(std::to_string(bad_probes) + " probe points not covered by exactly one leaf cell");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Statistics

double ExperimentStats::stderr_mean() const noexcept {
  return trials > 0 ? stddev / std::sqrt(static_cast<double>(trials)) : 0.0;
}

double ExperimentStats::median() const {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  auto v = values;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

ExperimentStats summarize(std::vector<double> values) {
  ExperimentStats s;
  s.trials = values.size();
  if (!values.empty()) {
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    s.ci95_half_width = 1.96 * s.stderr_mean();
  }
  s.values = std::move(values);
  return s;
}

AuditCounts& AuditCounts::operator+=(const AuditCounts& o) {
  trees += o.trees;
  tree_violations += o.tree_violations;
  sandwich_nodes += o.sandwich_nodes;
  sandwich_violations += o.sandwich_violations;
  cost_sandwich_violations += o.cost_sandwich_violations;
  refinement_increases += o.refinement_increases;
  nonfinite_ratios += o.nonfinite_ratios;
  return *this;
}

std::pair<std::size_t, std::size_t> audit_sandwich(const BuildTrace& trace, double rel_tol) {
  // Nodes are re-recorded on every step they stay active; audit each once.
  std::set<NodeId> audited;
  std::size_t violations = 0;
  for (const auto& step : trace.steps) {
    for (const auto& node : step.nodes) {
      if (!audited.insert(node.node).second) continue;
      if (!sandwich_holds(node.radius, node.diameter, rel_tol)) ++violations;
    }
  }
  return {audited.size(), violations};
}

namespace {

BuildResult audited_build(const CenterSet& centers, double delta, std::uint64_t seed,
                          AuditCounts& audit) {
  BuildConfig cfg;
  cfg.delta = delta;
  cfg.seed = seed;
  cfg.record_trace = true;
  auto built = build_tree(centers, cfg);
  const auto report = validate_tree(built.tree, centers, seed);
  const auto [nodes, bad] = audit_sandwich(built.trace);
  ++audit.trees;
  audit.tree_violations += report.violations.size();
  audit.sandwich_nodes += nodes;
  audit.sandwich_violations += bad;
  return built;
}

bool leaves_flag(const ExperimentStats& s, double bound) {
  return s.mean - 3.0 * s.stderr_mean() > bound;
}

}  // namespace

LeavesExperiment expected_leaves_experiment(const CenterSet& centers, double delta,
                                            std::size_t trials, std::uint64_t master_seed) {
  if (trials < 30) throw Error(ErrorCode::InvalidParameter, "need at least 30 trials");
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  epsilon_param(1, delta);  // validates delta

  LeavesExperiment out;
  std::vector<double> leaves(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    auto built = audited_build(centers, delta, derive_seed(master_seed, t), out.audit);
    leaves[t] = static_cast<double>(built.tree.leaf_count());
  }
  const auto k = static_cast<double>(centers.distinct_indices().size());
  out.bound = (1.0 + delta) * k;
  out.stats = summarize(std::move(leaves));
  out.flag_raised = leaves_flag(out.stats, out.bound);
  return out;
}

SeparationExperiment separation_frequency_experiment(const CenterSet& centers,
                                                     std::size_t trials,
                                                     std::uint64_t master_seed, double eps) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  const auto distinct = centers.distinct_indices();
  if (distinct.size() < 2) {
    throw Error(ErrorCode::InvalidNode, "separation needs at least two distinct centers");
  }
  std::pair<std::size_t, std::size_t> best{distinct[0], distinct[1]};
  double best_d2 = -1.0;
  for (std::size_t a = 0; a < distinct.size(); ++a) {
    for (std::size_t b = a + 1; b < distinct.size(); ++b) {
      const double d2 = squared_distance(centers[distinct[a]], centers[distinct[b]]);
      if (d2 > best_d2) {
        best_d2 = d2;
        best = {distinct[a], distinct[b]};
      }
    }
  }
  return separation_frequency_experiment(centers, best, trials, master_seed, eps);
}

SeparationExperiment separation_frequency_experiment(const CenterSet& centers,
                                                     std::pair<std::size_t, std::size_t> pair,
                                                     std::size_t trials,
                                                     std::uint64_t master_seed, double eps) {
  if (centers.empty()) throw Error(ErrorCode::EmptyInput, "center set is empty");
  if (trials == 0) throw Error(ErrorCode::InvalidParameter, "need at least one trial");
  if (!(eps > 0.0 && eps <= 1.0 / 320.0)) {
    throw Error(ErrorCode::InvalidParameter, "eps must lie in (0, 1/320]");
  }
  const auto node = centers.distinct_indices();
  if (node.size() < 2) {
    throw Error(ErrorCode::InvalidNode, "separation needs at least two distinct centers");
  }
  auto in_node = [&](std::size_t c) { return std::find(node.begin(), node.end(), c) != node.end(); };
  if (!in_node(pair.first) || !in_node(pair.second) || pair.first == pair.second) {
    throw Error(ErrorCode::InvalidParameter, "pair must be two distinct node centers");
  }

  SeparationExperiment out;
  out.first = pair.first;
  out.second = pair.second;
  out.diameter = diameter(centers, node);
  out.pair_distance = distance(centers[pair.first], centers[pair.second]);
  if (out.pair_distance < out.diameter / 2.0) {
    throw Error(ErrorCode::InvalidParameter, "pair is closer than half the node diameter");
  }

  const auto geometry = node_geometry(centers, node);
  Engine rng(derive_seed(master_seed, 0));
  std::vector<double> hits(trials, 0.0);
  auto holds_both = [&](const std::vector<std::size_t>& side) {
    return std::find(side.begin(), side.end(), pair.first) != side.end() &&
           std::find(side.begin(), side.end(), pair.second) != side.end();
  };
  for (std::size_t t = 0; t < trials; ++t) {
    const auto draw = sample_step(rng, centers.dim());
    const auto outcome = divide_and_share(centers, node, geometry, draw, eps);
    if (const auto* split = std::get_if<Split>(&outcome)) {
      if (!holds_both(split->left) && !holds_both(split->right)) hits[t] = 1.0;
    }
  }
  out.bound = 1.0 / (128.0 * static_cast<double>(centers.dim()));
  out.stats = summarize(std::move(hits));
  out.flag_raised = out.stats.mean + 3.0 * out.stats.stderr_mean() < out.bound;
  return out;
}

double competitive_ratio(const Dataset& data, const ThresholdTree& tree,
                         const CenterSet& ref_centers) {
  const double ref = clustering_cost(data, ref_centers);
  if (!(ref > 0.0)) {
    throw Error(ErrorCode::DegenerateInstance, "reference clustering cost is zero");
  }
  return tree_cost(data, tree, ref_centers) / ref;
}

std::vector<SweepRow> ratio_sweep(const SweepConfig& config) {
  if (config.ks.empty() || config.deltas.empty()) {
    throw Error(ErrorCode::InvalidParameter, "sweep needs at least one k and one delta");
  }
  if (config.trials < 30) throw Error(ErrorCode::InvalidParameter, "need at least 30 trials");
  for (double delta : config.deltas) epsilon_param(1, delta);

  std::vector<SweepRow> rows;
  std::uint64_t config_index = 0;
  for (std::size_t k : config.ks) {
    for (double delta : config.deltas) {
      const std::uint64_t config_seed = derive_seed(config.master_seed, config_index++);
      auto instance = gen_gaussian_mixture(k, config.d, config.n_per_cluster, config.center_box,
                                           config.noise_sigma, derive_seed(config_seed, 0));
      SeedConfig seed_cfg{k, derive_seed(config_seed, 1), config.lloyd_iters, 1e-9};
      const CenterSet ref = seed_centers(instance.points, seed_cfg);
      const Dataset& data = instance.points;

      SweepRow row;
      row.k = k;
      row.delta = delta;
      row.d = config.d;
      row.ref_cost = clustering_cost(data, ref);

      std::vector<double> leaves(config.trials), distinct(config.trials);
      std::vector<double> ratios(config.trials), refined(config.trials);
      std::vector<double> runtimes(config.trials);
      AuditCounts& audit = row.leaves.audit;
      for (std::size_t t = 0; t < config.trials; ++t) {
        const auto start = std::chrono::steady_clock::now();
        auto built = audited_build(ref, delta, derive_seed(config_seed, 2 + t), audit);
        runtimes[t] = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
        leaves[t] = static_cast<double>(built.tree.leaf_count());
        distinct[t] = static_cast<double>(built.tree.distinct_center_indices().size());

        const double cost = tree_cost(data, built.tree, ref);
        if (cost < row.ref_cost * (1.0 - 1e-9)) ++audit.cost_sandwich_violations;
        const auto refined_tree = refine_centroids(built.tree, data);
        const double refined_cost = tree_cost(data, refined_tree, ref);
        if (refined_cost > cost * (1.0 + 1e-9)) ++audit.refinement_increases;

        ratios[t] = row.ref_cost > 0.0 ? cost / row.ref_cost
                                       : std::numeric_limits<double>::infinity();
        refined[t] = row.ref_cost > 0.0 ? refined_cost / row.ref_cost
                                        : std::numeric_limits<double>::infinity();
        if (!std::isfinite(ratios[t]) || !std::isfinite(refined[t])) ++audit.nonfinite_ratios;
      }
      row.leaves.bound = (1.0 + delta) * static_cast<double>(ref.distinct_indices().size());
      row.leaves.stats = summarize(std::move(leaves));
      row.leaves.flag_raised = leaves_flag(row.leaves.stats, row.leaves.bound);
      row.distinct_centers = summarize(std::move(distinct));
      row.ratio = summarize(std::move(ratios));
      row.refined_ratio = summarize(std::move(refined));
      row.runtime_ms = summarize(std::move(runtimes));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace xkm
