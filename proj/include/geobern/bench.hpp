#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "geobern/cost_surface.hpp"
#include "geobern/geodesic_nlp.hpp"
#include "geobern/rng.hpp"
#include "geobern/solver.hpp"

namespace geobern {

/// One experiment: a field, an enclosing circle/sphere for boundary sampling,
/// and the trial plan. Boundary pairs are drawn per trial index from streams
/// derived from (seed, index), so results are schedule-independent.
struct Scenario {
  GaussianField field{2, 1000.0, 10.0, {}};
  double enclosure_radius = 0.0;  // <= 0: 1.5 * max_i(|c_i - centroid| + r_i)
  int trials = 25;
  std::vector<int> k_list{9, 15, 21, 27, 33, 39, 45};
  int m_order = 3;
  std::uint64_t seed = 1;
  std::vector<ProblemVariant> variants{ProblemVariant::GeodesicLike};
  double v_nominal = 1.0;
  SolverOptions solver;

  Eigen::VectorXd centroid() const;
  double effective_enclosure_radius() const;
};

/// Result of one solve inside a batch. `variant` holds the problem name, or
/// the initializer name for warmstart rows.
struct TrialRow {
  int k = 0;
  std::string variant;
  double solve_time_s = 0.0;
  std::string status;
  double objective = 0.0;
  double max_violation = 0.0;
  int seed_index = 0;
  double init_time_s = 0.0;     // warmstart rows: time to produce the guess
  bool init_infeasible = false; // warmstart rows: guess came from a failed solve
};

/// Two independent uniform points on the circle (D=2) or sphere (D=3) of the
/// enclosure radius around the obstacle centroid.
std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_boundary_pair(Rng& rng,
                                                                 const Scenario& scenario);

/// Solve every (K, variant, trial) cell from a straight-line guess. Solver
/// failures become rows with status "error"; the batch never aborts. Rows are
/// ordered (K, variant, trial) regardless of the job count.
std::vector<TrialRow> run_trial_set(const Scenario& scenario, int jobs = 1);

/// Three-way warmstart comparison on the HardObstacle problem (2D only):
/// initializers "geodesic", "geodesic-like" and "line". solve_time_s holds
/// initializer generation plus target solve time; an infeasible initializer
/// falls back to its best iterate and flags the row.
std::vector<TrialRow> warmstart_experiment(const Scenario& scenario, int jobs = 1);

struct AggregateRow {
  int k = 0;
  std::string variant;
  double mean_solve_s = 0.0;
  int infeasible = 0;
  int trials = 0;
  double mean_solve_feasible_s = 0.0;  // mean over rows that reached optimal
};

std::vector<AggregateRow> aggregate(const std::vector<TrialRow>& rows);

enum class ReportFormat { Csv, Json, Markdown };

/// Render rows to a document. CSV and markdown carry the aggregate table with
/// the fixed column order (K, variant, mean solve s, infeasible, trials);
/// JSON additionally embeds every trial row. Throws on empty input.
std::string emit_report(const std::vector<TrialRow>& rows, ReportFormat format);

/// Parse back the aggregate CSV written by emit_report.
std::vector<AggregateRow> parse_report_csv(const std::string& text);

}  // namespace geobern
