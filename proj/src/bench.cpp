#include "geobern/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace geobern {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double mean_or_zero(double sum, int count) { return count > 0 ? sum / count : 0.0; }

struct Task {
  int k = 0;
  ProblemVariant variant{};
  std::string label;
  int trial = 0;
};

void run_parallel(std::size_t n_tasks, int jobs, const std::function<void(std::size_t)>& work) {
  const int n_workers = std::max(1, std::min<int>(jobs, static_cast<int>(n_tasks)));
  if (n_workers == 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_tasks) return;
        work(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

Eigen::VectorXd Scenario::centroid() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(field.dimension());
  if (field.obstacles().empty()) return c;
  for (const Obstacle& obs : field.obstacles()) c += obs.center;
  return c / static_cast<double>(field.obstacles().size());
}

double Scenario::effective_enclosure_radius() const {
  if (enclosure_radius > 0.0) return enclosure_radius;
  if (field.obstacles().empty()) return 10.0;
  const Eigen::VectorXd mid = centroid();
  double reach = 0.0;
  for (const Obstacle& obs : field.obstacles())
    reach = std::max(reach, (obs.center - mid).norm() + obs.radius);
  return 1.5 * reach;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_boundary_pair(Rng& rng,
                                                                 const Scenario& scenario) {
  const Eigen::VectorXd mid = scenario.centroid();
  const double radius = scenario.effective_enclosure_radius();
  const int dim = scenario.field.dimension();

  auto draw = [&]() {
    Eigen::VectorXd p(dim);
    if (dim == 2) {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      p << std::cos(angle), std::sin(angle);
    } else {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      const double ring = std::sqrt(std::max(0.0, 1.0 - z * z));
      p << ring * std::cos(angle), ring * std::sin(angle), z;
    }
    return (mid + radius * p).eval();
  };
  const Eigen::VectorXd a = draw();
  const Eigen::VectorXd b = draw();
  return {a, b};
}

namespace {

TrialRow solve_one(const Scenario& scenario, const Task& task) {
  TrialRow row;
  row.k = task.k;
  row.variant = task.label;
  row.seed_index = task.trial;
  try {
    Rng rng = Rng::stream(scenario.seed, static_cast<std::uint64_t>(task.trial));
    const auto [p0, pf] = sample_boundary_pair(rng, scenario);
    const OCPSpec spec =
        OCPSpec::make(task.variant, p0, pf, task.k, scenario.m_order, scenario.v_nominal);
    const NLPInstance nlp = build_nlp(spec, scenario.field);
    const Eigen::VectorXd x0 =
        nlp.pack(ThetaVector::straight_line(p0, pf, spec.grid, scenario.m_order));
    const SolveReport report = solve(nlp, x0, scenario.solver);
    row.solve_time_s = report.wall_time;
    row.status = to_string(report.status);
    row.objective = report.objective;
    row.max_violation = std::max(report.max_eq_violation, report.max_ineq_violation);
  } catch (const std::exception&) {
    row.status = "error";
  }
  return row;
}

}  // namespace

std::vector<TrialRow> run_trial_set(const Scenario& scenario, int jobs) {
  std::vector<Task> tasks;
  for (int k : scenario.k_list)
    for (ProblemVariant variant : scenario.variants)
      for (int trial = 0; trial < scenario.trials; ++trial)
        tasks.push_back({k, variant, to_string(variant), trial});

  std::vector<TrialRow> rows(tasks.size());
  run_parallel(tasks.size(), jobs,
               [&](std::size_t i) { rows[i] = solve_one(scenario, tasks[i]); });
  return rows;
}

std::vector<TrialRow> warmstart_experiment(const Scenario& scenario, int jobs) {
  if (scenario.field.dimension() != 2)
    throw std::invalid_argument("warmstart_experiment: 2D scenarios only");

  struct WarmTask {
    int k = 0;
    int initializer = 0;  // 0 geodesic, 1 geodesic-like, 2 line
    int trial = 0;
  };
  static constexpr const char* kInitializerNames[] = {"geodesic", "geodesic-like", "line"};

  std::vector<WarmTask> tasks;
  for (int k : scenario.k_list)
    for (int init = 0; init < 3; ++init)
      for (int trial = 0; trial < scenario.trials; ++trial) tasks.push_back({k, init, trial});

  std::vector<TrialRow> rows(tasks.size());
  auto work = [&](std::size_t i) {
    const WarmTask& task = tasks[i];
    TrialRow row;
    row.k = task.k;
    row.variant = kInitializerNames[task.initializer];
    row.seed_index = task.trial;
    try {
      Rng rng = Rng::stream(scenario.seed, static_cast<std::uint64_t>(task.trial));
      const auto [p0, pf] = sample_boundary_pair(rng, scenario);
      const OCPSpec target_spec = OCPSpec::make(ProblemVariant::HardObstacle, p0, pf, task.k,
                                                scenario.m_order, scenario.v_nominal);
      const NLPInstance target = build_nlp(target_spec, scenario.field);

      const auto t_init = std::chrono::steady_clock::now();
      Eigen::VectorXd guess;
      if (task.initializer == 2) {
        guess = target.pack(
            ThetaVector::straight_line(p0, pf, target_spec.grid, scenario.m_order));
      } else {
        const ProblemVariant init_variant = task.initializer == 0
                                                ? ProblemVariant::GeodesicConstrained
                                                : ProblemVariant::GeodesicLike;
        const OCPSpec init_spec =
            OCPSpec::make(init_variant, p0, pf, task.k, scenario.m_order, scenario.v_nominal);
        const NLPInstance init_nlp = build_nlp(init_spec, scenario.field);
        const Eigen::VectorXd x0 =
            init_nlp.pack(ThetaVector::straight_line(p0, pf, init_spec.grid, scenario.m_order));
        const SolveReport init_report = solve(init_nlp, x0, scenario.solver);
        row.init_infeasible = init_report.status != SolveStatus::Optimal;
        guess = warmstart_guess(decode_solution(init_nlp, init_report.x_opt), target_spec);
      }
      row.init_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_init).count();

      const SolveReport report = solve(target, guess, scenario.solver);
      row.solve_time_s = row.init_time_s + report.wall_time;
      row.status = to_string(report.status);
      row.objective = report.objective;
      row.max_violation = std::max(report.max_eq_violation, report.max_ineq_violation);
    } catch (const std::exception&) {
      row.status = "error";
    }
    rows[i] = row;
  };
  run_parallel(tasks.size(), jobs, work);
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<double> feasible_sums;
  std::vector<int> feasible_counts;
  auto find = [&](int k, const std::string& variant) -> std::size_t {
    for (std::size_t i = 0; i < out.size(); ++i)
      if (out[i].k == k && out[i].variant == variant) return i;
    out.push_back({k, variant, 0.0, 0, 0, 0.0});
    feasible_sums.push_back(0.0);
    feasible_counts.push_back(0);
    return out.size() - 1;
  };
  for (const TrialRow& row : rows) {
    const std::size_t i = find(row.k, row.variant);
    out[i].mean_solve_s += row.solve_time_s;
    out[i].trials += 1;
    if (row.status == "infeasible") out[i].infeasible += 1;
    if (row.status == "optimal") {
      feasible_sums[i] += row.solve_time_s;
      feasible_counts[i] += 1;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_solve_s = mean_or_zero(out[i].mean_solve_s, out[i].trials);
    out[i].mean_solve_feasible_s = mean_or_zero(feasible_sums[i], feasible_counts[i]);
  }
  return out;
}

std::string emit_report(const std::vector<TrialRow>& rows, ReportFormat format) {
  if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
  const std::vector<AggregateRow> summary = aggregate(rows);

  if (format == ReportFormat::Csv) {
    std::ostringstream csv;
    csv << "k,variant,mean_solve_s,infeasible,trials,mean_solve_feasible_s\n";
    for (const AggregateRow& a : summary)
      csv << a.k << ',' << a.variant << ',' << format_double(a.mean_solve_s) << ','
          << a.infeasible << ',' << a.trials << ',' << format_double(a.mean_solve_feasible_s)
          << '\n';
    return csv.str();
  }

  if (format == ReportFormat::Json) {
    nlohmann::json doc;
    doc["trials"] = nlohmann::json::array();
    for (const TrialRow& row : rows) {
      doc["trials"].push_back({{"k", row.k},
                               {"variant", row.variant},
                               {"solve_time_s", row.solve_time_s},
                               {"status", row.status},
                               {"objective", row.objective},
                               {"max_violation", row.max_violation},
                               {"seed_index", row.seed_index},
                               {"init_time_s", row.init_time_s},
                               {"init_infeasible", row.init_infeasible}});
    }
    doc["aggregates"] = nlohmann::json::array();
    for (const AggregateRow& a : summary) {
      doc["aggregates"].push_back({{"k", a.k},
                                   {"variant", a.variant},
                                   {"mean_solve_s", a.mean_solve_s},
                                   {"infeasible", a.infeasible},
                                   {"trials", a.trials},
                                   {"mean_solve_feasible_s", a.mean_solve_feasible_s}});
    }
    return doc.dump(2) + "\n";
  }

  // Markdown. Warmstart sweeps (initializer triple) pivot into one table per
  // the three-way comparison; everything else gets one table per variant.
  std::vector<std::string> variants;
  for (const AggregateRow& a : summary)
    if (std::find(variants.begin(), variants.end(), a.variant) == variants.end())
      variants.push_back(a.variant);

  std::ostringstream md;
  const bool warmstart_shape =
      variants.size() == 3 &&
      std::find(variants.begin(), variants.end(), "geodesic") != variants.end() &&
      std::find(variants.begin(), variants.end(), "geodesic-like") != variants.end() &&
      std::find(variants.begin(), variants.end(), "line") != variants.end();

  auto fmt_seconds = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };

  if (warmstart_shape) {
    std::vector<int> ks;
    for (const AggregateRow& a : summary)
      if (std::find(ks.begin(), ks.end(), a.k) == ks.end()) ks.push_back(a.k);
    auto lookup = [&](int k, const std::string& variant) -> const AggregateRow* {
      for (const AggregateRow& a : summary)
        if (a.k == k && a.variant == variant) return &a;
      return nullptr;
    };
    md << "| K | Geo Time (s) | Geo-Like Time (s) | Line Time (s) |\n";
    md << "|---|---|---|---|\n";
    for (int k : ks) {
      md << "| " << k;
      for (const char* name : {"geodesic", "geodesic-like", "line"}) {
        const AggregateRow* a = lookup(k, name);
        md << " | " << (a ? fmt_seconds(a->mean_solve_s) : "-");
      }
      md << " |\n";
    }
    return md.str();
  }

  for (const std::string& variant : variants) {
    md << "### " << variant << "\n\n";
    md << "| K | Solve (s) | Infeasible |\n";
    md << "|---|---|---|\n";
    for (const AggregateRow& a : summary)
      if (a.variant == variant)
        md << "| " << a.k << " | " << fmt_seconds(a.mean_solve_s) << " | " << a.infeasible
           << " |\n";
    md << '\n';
  }
  return md.str();
}

std::vector<AggregateRow> parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,variant,mean_solve_s,infeasible,trials,mean_solve_feasible_s")
    throw std::invalid_argument("parse_report_csv: unexpected header");
  std::vector<AggregateRow> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    AggregateRow row;
    std::string token;
    std::getline(fields, token, ',');
    row.k = std::stoi(token);
    std::getline(fields, row.variant, ',');
    std::getline(fields, token, ',');
    row.mean_solve_s = std::stod(token);
    std::getline(fields, token, ',');
    row.infeasible = std::stoi(token);
    std::getline(fields, token, ',');
    row.trials = std::stoi(token);
    std::getline(fields, token, ',');
    row.mean_solve_feasible_s = std::stod(token);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace geobern
