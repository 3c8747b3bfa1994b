#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <string>

#include "geobern/bernstein.hpp"
#include "geobern/cost_surface.hpp"
#include "geobern/segment_grid.hpp"

namespace geobern {

enum class ProblemVariant { GeodesicConstrained, GeodesicLike, HardObstacle };

std::string to_string(ProblemVariant variant);
ProblemVariant variant_from_string(const std::string& name);

/// One discretized trajectory problem: boundary points, grid, derivative
/// order and variant-specific parameters. Negative optional fields mean
/// "use the default rule".
struct OCPSpec {
  Eigen::VectorXd p0;
  Eigen::VectorXd pf;
  SegmentGrid grid{std::vector<double>{0.0, 1.0}};
  int m_order = 3;  // M; the position curve has per-segment order M
  ProblemVariant variant = ProblemVariant::GeodesicLike;

  double v_max = -1.0;   // HardObstacle speed bound; default 2*|pf-p0|/horizon
  double r_sep = -1.0;   // HardObstacle separation; default obstacle radius
  double delta = -1.0;   // geodesic equality band; default 1e-4*v^2/horizon, 0 = exact
  double rho_override = -1.0;  // clearance level; default A*exp(-kappa/2)

  int dimension() const { return static_cast<int>(p0.size()); }

  /// Spec with the default uniform grid: t_0 = 0,
  /// t_K = |pf - p0| / v_nominal, K segments.
  static OCPSpec make(ProblemVariant variant, const Eigen::VectorXd& p0,
                      const Eigen::VectorXd& pf, int segments, int m_order = 3,
                      double v_nominal = 1.0);
};

/// Discretized problem as callables over the flat decision vector
/// x = [theta_dim0, theta_dim1, ...], each block laid out
/// [cps_0..cps_{K-1}, c_0..c_{M-1}]. Inequalities use the <= 0 convention.
/// eq_band(i) > 0 relaxes equality row i to |c_i(x)| <= band. All callables
/// are pure and safe to evaluate concurrently.
struct NLPInstance {
  int n_vars = 0;
  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eq_constraints;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> ineq_constraints;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> objective_gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eq_jacobian;      // m_eq x n
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> ineq_jacobian;    // m_ineq x n
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> objective_hessian;  // optional

  /// Optional conditioned view of the inequality rows for the solver: same
  /// feasible set under a monotone transform, row for row. The Gaussian level
  /// rows f - rho span six orders of magnitude across a bump; their log form
  /// is quadratic in distance and keeps Newton models honest. Reported
  /// violations always come from ineq_constraints.
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solver_ineq;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> solver_ineq_jacobian;
  Eigen::VectorXd eq_band;

  int n_eq = 0;
  int n_ineq = 0;

  // Decision-vector layout.
  SegmentGrid grid{std::vector<double>{0.0, 1.0}};
  int dimension = 0;
  int m_order = 0;
  ProblemVariant variant = ProblemVariant::GeodesicLike;
  double rho = 0.0;

  ThetaVector unpack(const Eigen::VectorXd& x) const;
  Eigen::VectorXd pack(const ThetaVector& theta) const;
};

/// Residual of the geodesic equation at one state: component k equals
/// a_k + sum_ij Gamma^k_ij v_i v_j; zero iff the state is geodesic.
Eigen::VectorXd geodesic_residual(const GaussianField& field, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& v, const Eigen::VectorXd& a);

/// Discrete Bolza running cost: (t_K - t_0)/(K+1) * sum over knots of the
/// squared velocity norm. The endpoint cost is zero for every variant here.
double discrete_cost(const ThetaVector& theta);

/// Assemble the discretized problem for a variant:
///   - boundary equalities pin position knots 0 and K to p0, pf (2D rows);
///   - GeodesicConstrained adds the geodesic residual at every knot
///     (D*(K+1) equality rows, banded by delta) and f(X_k) - rho <= 0;
///   - GeodesicLike keeps only the field inequality;
///   - HardObstacle swaps the field rows for per-obstacle separation
///     r_sep - |X_k - c_i| <= 0 and the speed bound |V_k| - v_max <= 0.
/// Objective is discrete_cost in every variant. Gradients are closed-form
/// chains over the knot-extraction matrices and the field derivatives.
NLPInstance build_nlp(const OCPSpec& spec, const GaussianField& field);

/// Reconstruct the trajectory behind a decision vector; samples_per_segment
/// dense points per segment plus the endpoint.
Trajectory decode_solution(const NLPInstance& nlp, const Eigen::VectorXd& x_opt,
                           int samples_per_segment = 50);

/// Re-encode a solved trajectory as the initial guess for another problem.
/// Matching grids re-encode exactly; otherwise the theta is fit by least
/// squares on dense position samples mapped onto the target horizon.
Eigen::VectorXd warmstart_guess(const Trajectory& source, const OCPSpec& target_spec);

}  // namespace geobern
