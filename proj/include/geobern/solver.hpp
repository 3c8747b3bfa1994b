#pragma once

#include <Eigen/Core>
#include <vector>

#include "geobern/geodesic_nlp.hpp"

namespace geobern {

enum class DerivativeMode {
  AnalyticChain,          // closed-form chain-rule Jacobians from the instance
  FiniteDifferenceCheck,  // central differences on values only (slow; for checks)
};

struct SolverOptions {
  double tol_feas = 1e-6;  // max constraint violation accepted as feasible
  double tol_opt = 1e-6;   // Lagrangian gradient norm at optimality
  int max_outer = 50;
  int max_inner = 500;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e10;
  DerivativeMode derivative_mode = DerivativeMode::AnalyticChain;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit };

std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd x_opt;
  double objective = 0.0;
  double max_eq_violation = 0.0;    // beyond the per-row band
  double max_ineq_violation = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  double wall_time = 0.0;  // seconds, monotonic clock
  double kkt_stationarity = 0.0;
  double kkt_complementarity = 0.0;
  std::vector<double> violation_history;  // at x0, then after each outer
};

/// Augmented-Lagrangian solve: multiplier updates around a limited-memory
/// quasi-Newton inner minimizer with backtracking line search. Banded
/// equality rows (|c| <= band) are folded into the inequality set. The
/// iterate sequence is deterministic for fixed inputs.
///
/// Infeasibility is declared once the penalty has reached penalty_max while
/// the violation stays above tol_feas and improved by less than 1% over the
/// last five outer iterations.
SolveReport solve(const NLPInstance& nlp, const Eigen::VectorXd& x0,
                  const SolverOptions& opts = {});

/// Max relative error between the instance's analytic derivatives and central
/// finite differences with step h, over the objective gradient and both
/// Jacobians.
double check_gradients(const NLPInstance& nlp, const Eigen::VectorXd& x, double h);

}  // namespace geobern
