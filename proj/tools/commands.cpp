#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "xkm/builder.hpp"
#include "xkm/eval.hpp"
#include "xkm/instances.hpp"
#include "xkm/io.hpp"
#include "xkm/random.hpp"
#include "xkm/seeding.hpp"

namespace xkm::cli {

namespace fs = std::filesystem;

namespace {

struct SeedArgs {
  std::string input, output;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t lloyd_iters = 0;
  double lloyd_tol = 1e-6;
};

struct BuildArgs {
  std::string centers, refine, trace, output;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t max_steps = 0;
};

struct EvalArgs {
  std::string points, centers, tree, output;
  bool append = false;
};

struct GenArgs {
  std::string family, out_points, out_centers;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  double delta = 0.01;
  std::size_t dim = 0;
  std::size_t multiplicity = 0;
  bool strict = false;
  std::size_t d = 2;
  std::size_t n_per_cluster = 100;
  double center_box = 10.0;
  double noise_sigma = 1.0;
};

struct BenchArgs {
  std::string experiment, output, centers;
  std::uint64_t seed = 0;
  std::size_t k = 10;
  std::size_t d = 10;
  double delta = 0.1;
  std::size_t trials = 0;
  double eps = 1.0 / 320.0;
  std::size_t n_per_cluster = 20;
  double center_box = 10.0;
  double noise_sigma = 1.0;
  std::size_t lloyd_iters = 25;
  std::vector<std::size_t> ks{10, 50, 100};
  std::vector<double> deltas{0.1, 0.2, 0.5};
};

void print_kv(std::ostream& out, std::string_view key, double v) {
  out << key << '=' << io::format_double(v) << '\n';
}

int cmd_seed(const SeedArgs& a, std::ostream& out) {
  if (a.k < 1) throw Error(ErrorCode::InvalidParameter, "--k must be at least 1");
  const Dataset data = io::read_points_csv(fs::path(a.input));
  const SeedConfig cfg{a.k, a.seed, a.lloyd_iters, a.lloyd_tol};
  const CenterSet centers = seed_centers(data, cfg);
  io::write_points_csv(fs::path(a.output), centers);
  print_kv(out, "cost", clustering_cost(data, centers));
  return kSuccess;
}

int cmd_build(const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const CenterSet centers = io::read_centers_csv(fs::path(a.centers));
  BuildConfig cfg;
  cfg.delta = a.delta;
  cfg.seed = a.seed;
  cfg.record_trace = !a.trace.empty();
  if (a.max_steps > 0) cfg.max_steps = a.max_steps;
  epsilon_param(1, cfg.delta);

  const io::TraceHeader header{centers.distinct_indices().size(), centers.dim(), a.delta, a.seed};
  auto write_trace = [&](const BuildTrace& trace) {
    std::ofstream t(a.trace, std::ios::binary | std::ios::trunc);
    if (!t) throw Error(ErrorCode::InvalidParameter, "cannot write " + a.trace);
    io::write_trace(t, header, trace);
  };

  BuildResult built;
  try {
    built = build_tree(centers, cfg);
  } catch (const TerminationCapExceeded& e) {
    if (!a.trace.empty()) write_trace(e.partial_trace());
    err << "error: " << e.what() << '\n';
    return kTerminationCap;
  }
  if (!a.trace.empty()) write_trace(built.trace);

  std::optional<Dataset> data;
  if (!a.refine.empty()) {
    data = io::read_points_csv(fs::path(a.refine));
    require_same_dim(centers.dim(), data->dim(), "--refine points");
    built.tree = refine_centroids(std::move(built.tree), *data);
  }

  io::TreeFile file;
  file.k = centers.size();
  file.d = centers.dim();
  file.delta = a.delta;
  file.seed = a.seed;
  file.tree = std::move(built.tree);
  io::save_tree(fs::path(a.output), file);

  out << "leaves=" << file.tree.leaf_count() << '\n';
  out << "distinct_centers=" << file.tree.distinct_center_indices().size() << '\n';
  out << "steps=" << built.steps << '\n';
  if (data) print_kv(out, "tree_cost", tree_cost(*data, file.tree, centers));
  return kSuccess;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset data = io::read_points_csv(fs::path(a.points));
  const CenterSet centers = io::read_centers_csv(fs::path(a.centers));
  const io::TreeFile file = io::load_tree(fs::path(a.tree));
  require_same_dim(centers.dim(), data.dim(), "points vs centers");
  require_same_dim(file.d, data.dim(), "points vs tree");
  const auto report = validate_tree(file.tree, centers);
  if (!report.ok()) {
    throw Error(ErrorCode::TreeInvariantViolation, "invalid tree: " + report.violations.front());
  }

  const auto start = std::chrono::steady_clock::now();
  io::ReportRow row;
  row.k = file.k;
  row.delta = file.delta;
  row.seed = file.seed;
  row.leaf_count = report.leaf_count;
  row.distinct_centers = report.distinct_center_count;
  row.tree_cost = tree_cost(data, file.tree, centers);
  row.ref_cost = clustering_cost(data, centers);
  if (row.ref_cost > 0.0) {
    row.ratio = row.tree_cost / row.ref_cost;
  } else {
    row.ratio = std::numeric_limits<double>::quiet_NaN();
    err << "warning: reference cost is zero; ratio undefined (tree_cost="
        << io::format_double(row.tree_cost) << ")\n";
  }
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  io::write_report_rows(fs::path(a.output), {row}, a.append);

  print_kv(out, "tree_cost", row.tree_cost);
  print_kv(out, "ref_cost", row.ref_cost);
  print_kv(out, "ratio", row.ratio);
  return kSuccess;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
  GeneratedInstance inst;
  if (a.family == "lb") {
    HardInstanceSpec spec;
    spec.k = a.k;
    spec.delta = a.delta;
    spec.seed = a.seed;
    spec.strict = a.strict;
    if (a.dim > 0) spec.dim_override = a.dim;
    if (a.multiplicity > 0) spec.multiplicity_override = a.multiplicity;
    inst = gen_lower_bound_instance(spec);
  } else {
    inst = gen_gaussian_mixture(a.k, a.d, a.n_per_cluster, a.center_box, a.noise_sigma, a.seed);
  }
  io::write_points_csv(fs::path(a.out_points), inst.points);
  io::write_points_csv(fs::path(a.out_centers), inst.planted_centers);

  const auto& m = inst.metadata;
  print_kv(out, "planted_cost", inst.planted_cost);
  out << "points=" << inst.points.size() << '\n';
  out << "k=" << m.k << '\n';
  out << "d=" << m.d << '\n';
  if (a.family == "lb") {
    print_kv(out, "step", m.step);
    out << "multiplicity=" << m.multiplicity << '\n';
    out << "dim_override=" << (m.dim_overridden ? "yes" : "no") << '\n';
    out << "multiplicity_override=" << (m.multiplicity_overridden ? "yes" : "no") << '\n';
    print_kv(out, "formula_cost", planted_cost_formula(m.k, m.d, m.step));
    out << "well_separated=" << (centers_well_separated(inst.planted_centers) ? "yes" : "no")
        << '\n';
  } else {
    out << "n_per_cluster=" << m.multiplicity << '\n';
  }
  return kSuccess;
}

CenterSet bench_centers(const BenchArgs& a, bool random_uniform) {
  if (!a.centers.empty()) return io::read_centers_csv(fs::path(a.centers));
  if (random_uniform) {
    return gen_gaussian_mixture(a.k, a.d, 1, 1.0, 0.0, derive_seed(a.seed, 0)).planted_centers;
  }
  const auto inst = gen_gaussian_mixture(a.k, a.d, a.n_per_cluster, a.center_box, a.noise_sigma,
                                         derive_seed(a.seed, 0));
  return seed_centers(inst.points, {a.k, derive_seed(a.seed, 1), a.lloyd_iters, 1e-9});
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  std::vector<io::StatsRow> rows;
  bool flagged = false;

  if (a.experiment == "leaves") {
    const CenterSet centers = bench_centers(a, false);
    const auto res =
        expected_leaves_experiment(centers, a.delta, a.trials ? a.trials : 200, derive_seed(a.seed, 2));
    flagged = res.flag_raised;
    rows.push_back({"leaves", "leaf_count", centers.distinct_indices().size(), centers.dim(),
                    a.delta, res.stats, res.bound, res.flag_raised});
    print_kv(out, "mean_leaves", res.stats.mean);
    print_kv(out, "stderr", res.stats.stderr_mean());
    print_kv(out, "bound", res.bound);
    out << "audit_violations=" << res.audit.total_violations() << '\n';
  } else if (a.experiment == "separation") {
    const CenterSet centers = bench_centers(a, true);
    const auto res = separation_frequency_experiment(centers, a.trials ? a.trials : 5000,
                                                     derive_seed(a.seed, 2), a.eps);
    flagged = res.flag_raised;
    rows.push_back({"separation", "separated", centers.distinct_indices().size(), centers.dim(),
                    0.0, res.stats, res.bound, res.flag_raised});
    print_kv(out, "frequency", res.stats.mean);
    print_kv(out, "stderr", res.stats.stderr_mean());
    print_kv(out, "bound", res.bound);
  } else {
    SweepConfig cfg;
    cfg.ks = a.ks;
    cfg.deltas = a.deltas;
    cfg.d = a.d;
    cfg.n_per_cluster = a.n_per_cluster;
    cfg.center_box = a.center_box;
    cfg.noise_sigma = a.noise_sigma;
    cfg.lloyd_iters = a.lloyd_iters;
    cfg.trials = a.trials ? a.trials : 200;
    cfg.master_seed = a.seed;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : ratio_sweep(cfg)) {
      flagged = flagged || row.leaves.flag_raised;
      rows.push_back({"ratio-sweep", "leaf_count", row.k, row.d, row.delta, row.leaves.stats,
                      row.leaves.bound, row.leaves.flag_raised});
      rows.push_back({"ratio-sweep", "distinct_centers", row.k, row.d, row.delta,
                      row.distinct_centers, static_cast<double>(row.k), false});
      rows.push_back({"ratio-sweep", "ratio", row.k, row.d, row.delta, row.ratio, nan, false});
      rows.push_back({"ratio-sweep", "refined_ratio", row.k, row.d, row.delta, row.refined_ratio,
                      nan, false});
      out << "k=" << row.k << " delta=" << io::format_double(row.delta)
          << " mean_leaves=" << io::format_double(row.leaves.stats.mean)
          << " median_ratio=" << io::format_double(row.ratio.median())
          << " median_refined_ratio=" << io::format_double(row.refined_ratio.median())
          << " audit_violations=" << row.leaves.audit.total_violations() << '\n';
    }
  }
  io::write_stats_rows(fs::path(a.output), rows);
  out << "flag=" << (flagged ? 1 : 0) << '\n';
  return flagged ? kGuaranteeFlag : kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explainable k-means via randomized threshold trees", "xkm"};
  app.require_subcommand(1);

  SeedArgs seed_args;
  auto* seed = app.add_subcommand("seed", "k-means++ (+ Lloyd) reference centers");
  seed->add_option("--input", seed_args.input, "points CSV")->required();
  seed->add_option("--k", seed_args.k, "number of centers")->required();
  seed->add_option("--seed", seed_args.seed, "RNG seed")->required();
  seed->add_option("--lloyd-iters", seed_args.lloyd_iters, "Lloyd rounds after seeding");
  seed->add_option("--lloyd-tol", seed_args.lloyd_tol, "relative improvement stop");
  seed->add_option("--output", seed_args.output, "centers CSV")->required();

  BuildArgs build_args;
  auto* build = app.add_subcommand("build", "grow a threshold tree over centers");
  build->add_option("--centers", build_args.centers, "centers CSV")->required();
  build->add_option("--delta", build_args.delta, "leaf slack in (0,1)")->required();
  build->add_option("--seed", build_args.seed, "RNG seed")->required();
  build->add_option("--refine", build_args.refine, "points CSV for centroid refinement");
  build->add_option("--trace", build_args.trace, "write per-step trace");
  build->add_option("--max-steps", build_args.max_steps, "step cap (default 200 d ceil(ln(k+1)) k)");
  build->add_option("--output", build_args.output, "tree JSON")->required();

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "tree cost and competitive ratio");
  eval->add_option("--points", eval_args.points, "points CSV")->required();
  eval->add_option("--centers", eval_args.centers, "reference centers CSV")->required();
  eval->add_option("--tree", eval_args.tree, "tree JSON")->required();
  eval->add_option("--output", eval_args.output, "report CSV")->required();
  eval->add_flag("--append", eval_args.append, "append to an existing report");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "synthetic instances");
  gen->add_option("--family", gen_args.family, "lb | gmm")
      ->required()
      ->check(CLI::IsMember({"lb", "gmm"}));
  gen->add_option("--seed", gen_args.seed, "RNG seed")->required();
  gen->add_option("--k", gen_args.k, "number of centers")->required();
  gen->add_option("--delta", gen_args.delta, "lb: delta in (0,1)");
  gen->add_option("--dim", gen_args.dim, "lb: dimension override");
  gen->add_option("--multiplicity", gen_args.multiplicity, "lb: copies per center override");
  gen->add_flag("--strict", gen_args.strict, "lb: resample until centers are sqrt(d)/5 apart");
  gen->add_option("--d", gen_args.d, "gmm: dimension");
  gen->add_option("--n-per-cluster", gen_args.n_per_cluster, "gmm: points per center");
  gen->add_option("--center-box", gen_args.center_box, "gmm: centers in [0,box]^d");
  gen->add_option("--noise-sigma", gen_args.noise_sigma, "gmm: Gaussian noise");
  gen->add_option("--out-points", gen_args.out_points, "points CSV")->required();
  gen->add_option("--out-centers", gen_args.out_centers, "planted centers CSV")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "statistical checks of the guarantees");
  bench->add_option("--experiment", bench_args.experiment, "leaves | separation | ratio-sweep")
      ->required()
      ->check(CLI::IsMember({"leaves", "separation", "ratio-sweep"}));
  bench->add_option("--seed", bench_args.seed, "master seed")->required();
  bench->add_option("--output", bench_args.output, "stats CSV")->required();
  bench->add_option("--centers", bench_args.centers, "centers CSV (else generated)");
  bench->add_option("--k", bench_args.k, "centers to generate");
  bench->add_option("--d", bench_args.d, "dimension of generated data");
  bench->add_option("--delta", bench_args.delta, "leaves: delta");
  bench->add_option("--trials", bench_args.trials, "trials (200 leaves/sweep, 5000 separation)");
  bench->add_option("--eps", bench_args.eps, "separation: strip parameter");
  bench->add_option("--n-per-cluster", bench_args.n_per_cluster, "generated points per cluster");
  bench->add_option("--center-box", bench_args.center_box, "generated centers in [0,box]^d");
  bench->add_option("--noise-sigma", bench_args.noise_sigma, "generated Gaussian noise");
  bench->add_option("--lloyd-iters", bench_args.lloyd_iters, "Lloyd rounds for reference centers");
  bench->add_option("--ks", bench_args.ks, "ratio-sweep: k values")->delimiter(',');
  bench->add_option("--deltas", bench_args.deltas, "ratio-sweep: delta values")->delimiter(',');

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*seed) return cmd_seed(seed_args, out);
    if (*build) return cmd_build(build_args, out, err);
    if (*eval) return cmd_eval(eval_args, out, err);
    if (*gen) return cmd_gen(gen_args, out);
    if (*bench) return cmd_bench(bench_args, out);
  } catch (const TerminationCapExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kTerminationCap;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace xkm::cli
