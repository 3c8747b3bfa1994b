#include <CLI11.hpp>
#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <thread>

#include "geobern/bench.hpp"
#include "geobern/plot.hpp"
#include "geobern/scenario.hpp"

namespace {

using namespace geobern;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  Eigen::VectorXd out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i) = values[i];
  return out;
}

nlohmann::json report_json(const SolveReport& report, const OCPSpec& spec, double rho) {
  std::vector<double> p0(spec.p0.data(), spec.p0.data() + spec.p0.size());
  std::vector<double> pf(spec.pf.data(), spec.pf.data() + spec.pf.size());
  return {
      {"status", to_string(report.status)},
      {"objective", report.objective},
      {"max_eq_violation", report.max_eq_violation},
      {"max_ineq_violation", report.max_ineq_violation},
      {"outer_iters", report.outer_iters},
      {"inner_iters", report.inner_iters},
      {"wall_time_s", report.wall_time},
      {"kkt_stationarity", report.kkt_stationarity},
      {"kkt_complementarity", report.kkt_complementarity},
      {"variant", to_string(spec.variant)},
      {"k", spec.grid.segments()},
      {"m", spec.m_order},
      {"rho", rho},
      {"p0", p0},
      {"pf", pf},
  };
}

struct PlanArgs {
  std::string scenario_path;
  std::string variant = "geodesic-like";
  int segments = 21;
  int m_order = -1;
  std::vector<double> p0, pf;
  std::string out_dir = "plan-out";
  std::uint64_t seed = 1;
  int samples_per_segment = 50;
  double delta = -1.0;
  bool exact = false;
};

int cmd_plan(const PlanArgs& args) {
  const Scenario scenario = load_scenario(args.scenario_path);
  const int dim = scenario.field.dimension();

  Eigen::VectorXd p0, pf;
  if (!args.p0.empty() || !args.pf.empty()) {
    if (static_cast<int>(args.p0.size()) != dim || static_cast<int>(args.pf.size()) != dim) {
      std::cerr << "plan: --p0/--pf must both be given with " << dim << " components\n";
      return kExitConfig;
    }
    p0 = to_vector(args.p0);
    pf = to_vector(args.pf);
  } else {
    Rng rng = Rng::stream(args.seed, 0);
    std::tie(p0, pf) = sample_boundary_pair(rng, scenario);
  }

  OCPSpec spec = OCPSpec::make(variant_from_string(args.variant), p0, pf, args.segments,
                               args.m_order > 0 ? args.m_order : scenario.m_order,
                               scenario.v_nominal);
  if (args.exact) spec.delta = 0.0;
  else if (args.delta >= 0.0) spec.delta = args.delta;

  const NLPInstance nlp = build_nlp(spec, scenario.field);
  const Eigen::VectorXd x0 =
      nlp.pack(ThetaVector::straight_line(p0, pf, spec.grid, spec.m_order));
  const SolveReport report = solve(nlp, x0, scenario.solver);
  const Trajectory trajectory = decode_solution(nlp, report.x_opt, args.samples_per_segment);

  const std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "trajectory.csv", trajectory_csv(trajectory, scenario.field));

  nlohmann::json doc = report_json(report, spec, nlp.rho);
  doc["knot_positions"] = nlohmann::json::array();
  for (Eigen::Index k = 0; k < trajectory.knot_positions.cols(); ++k) {
    std::vector<double> knot(trajectory.knot_positions.col(k).data(),
                             trajectory.knot_positions.col(k).data() + dim);
    doc["knot_positions"].push_back(knot);
  }
  write_file(out_dir / "report.json", doc.dump(2) + "\n");

  if (dim == 2)
    write_file(out_dir / "plan.svg", trajectory_svg(trajectory, scenario.field, nlp.rho));

  std::cout << "status: " << to_string(report.status) << "  objective: " << report.objective
            << "  wall time: " << report.wall_time << " s\n";
  return report.status == SolveStatus::Optimal ? kExitOk : kExitInfeasible;
}

struct BenchArgs {
  std::string scenario_path;
  std::vector<int> k_list;
  int trials = -1;
  std::int64_t seed = -1;
  bool warmstart = false;
  std::string out_dir = "bench-out";
  int jobs = 0;
};

int cmd_bench(const BenchArgs& args) {
  Scenario scenario = load_scenario(args.scenario_path);
  if (!args.k_list.empty()) scenario.k_list = args.k_list;
  if (args.trials > 0) scenario.trials = args.trials;
  if (args.seed >= 0) scenario.seed = static_cast<std::uint64_t>(args.seed);
  const int jobs = args.jobs > 0 ? args.jobs
                                 : static_cast<int>(std::thread::hardware_concurrency());

  const std::vector<TrialRow> rows =
      args.warmstart ? warmstart_experiment(scenario, jobs) : run_trial_set(scenario, jobs);

  const std::filesystem::path out_dir(args.out_dir);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir / "report.csv", emit_report(rows, ReportFormat::Csv));
  write_file(out_dir / "report.json", emit_report(rows, ReportFormat::Json));
  write_file(out_dir / "report.md", emit_report(rows, ReportFormat::Markdown));

  std::cout << emit_report(rows, ReportFormat::Markdown);
  return kExitOk;
}

struct SurfaceArgs {
  std::string scenario_path;
  int resolution = 101;
  std::string out_file = "surface.csv";
};

int cmd_surface(const SurfaceArgs& args) {
  const Scenario scenario = load_scenario(args.scenario_path);
  if (scenario.field.dimension() != 2) {
    std::cerr << "surface: 2D scenarios only\n";
    return kExitConfig;
  }
  const Eigen::VectorXd mid = scenario.centroid();
  const double reach = 1.1 * scenario.effective_enclosure_radius();
  const Eigen::Vector2d lower(mid(0) - reach, mid(1) - reach);
  const Eigen::Vector2d upper(mid(0) + reach, mid(1) + reach);
  write_file(args.out_file,
             surface_grid_csv(scenario.field, lower, upper, args.resolution));
  return kExitOk;
}

struct CheckArgs {
  std::string scenario_path;
  int segments = 9;
  std::uint64_t seed = 1;
};

int cmd_check_gradients(const CheckArgs& args) {
  const Scenario scenario = load_scenario(args.scenario_path);
  Rng rng = Rng::stream(args.seed, 0);
  const auto [p0, pf] = sample_boundary_pair(rng, scenario);

  double worst = 0.0;
  for (ProblemVariant variant : {ProblemVariant::GeodesicConstrained,
                                 ProblemVariant::GeodesicLike, ProblemVariant::HardObstacle}) {
    const OCPSpec spec =
        OCPSpec::make(variant, p0, pf, args.segments, scenario.m_order, scenario.v_nominal);
    const NLPInstance nlp = build_nlp(spec, scenario.field);
    Eigen::VectorXd x = nlp.pack(ThetaVector::straight_line(p0, pf, spec.grid, spec.m_order));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += rng.uniform(-0.5, 0.5);
    const double h = 1e-6 * (1.0 + x.norm());
    worst = std::max(worst, check_gradients(nlp, x, h));
  }
  std::cout << "max relative derivative error: " << worst << "\n";
  return worst <= 1e-5 ? kExitOk : kExitInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Composite-Bernstein geodesic trajectory planner"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  CLI::App* plan = app.add_subcommand("plan", "Plan a single trajectory");
  plan->add_option("--scenario", plan_args.scenario_path, "Scenario file or canned-2d/canned-3d")
      ->required();
  plan->add_option("--variant", plan_args.variant, "geodesic | geodesic-like | hard");
  plan->add_option("--k", plan_args.segments, "Segment count");
  plan->add_option("--m", plan_args.m_order, "Antiderivative order (default from scenario)");
  plan->add_option("--p0", plan_args.p0, "Start point x,y[,z]")->delimiter(',');
  plan->add_option("--pf", plan_args.pf, "End point x,y[,z]")->delimiter(',');
  plan->add_option("--out", plan_args.out_dir, "Output directory");
  plan->add_option("--seed", plan_args.seed, "Seed for sampled boundary points");
  plan->add_option("--samples", plan_args.samples_per_segment, "Samples per segment");
  plan->add_option("--delta", plan_args.delta, "Geodesic equality band");
  plan->add_flag("--exact", plan_args.exact, "Exact geodesic equalities (delta = 0)");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Run a benchmark sweep");
  bench->add_option("--scenario", bench_args.scenario_path, "Scenario file or canned name")
      ->required();
  bench->add_option("--k-list", bench_args.k_list, "Segment counts")->delimiter(',');
  bench->add_option("--trials", bench_args.trials, "Trials per cell");
  bench->add_option("--seed", bench_args.seed, "Base RNG seed");
  bench->add_flag("--warmstart", bench_args.warmstart, "Three-way warmstart comparison");
  bench->add_option("--out", bench_args.out_dir, "Output directory");
  bench->add_option("--jobs", bench_args.jobs, "Parallel trials (default: hardware)");

  SurfaceArgs surface_args;
  CLI::App* surface = app.add_subcommand("surface", "Export the cost surface grid");
  surface->add_option("--scenario", surface_args.scenario_path, "Scenario file or canned name")
      ->required();
  surface->add_option("--res", surface_args.resolution, "Grid resolution per axis");
  surface->add_option("--out", surface_args.out_file, "Output CSV path");

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand("check-gradients", "Verify analytic derivatives");
  check->add_option("--scenario", check_args.scenario_path, "Scenario file or canned name")
      ->required();
  check->add_option("--k", check_args.segments, "Segment count");
  check->add_option("--seed", check_args.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args);
    if (bench->parsed()) return cmd_bench(bench_args);
    if (surface->parsed()) return cmd_surface(surface_args);
    if (check->parsed()) return cmd_check_gradients(check_args);
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return kExitInternal;
  }
  return kExitConfig;
}
