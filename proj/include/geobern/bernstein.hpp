#pragma once

#include <Eigen/Core>
#include <vector>

#include "geobern/segment_grid.hpp"

namespace geobern {

/// Bernstein basis function b_{j,N}(t) on [t0, tf], evaluated from the
/// closed-form binomial expression. Values lie in [0, 1] and the basis sums
/// to one at every t in the interval.
///
/// Throws std::domain_error for j outside 0..order, t outside [t0, tf], or a
/// non-increasing interval.
double basis_eval(int j, int order, double t, double t0, double tf);

/// Integration matrix for one segment of duration (t_next - t_prev): maps the
/// N+1 control points of a derivative polynomial (as a row vector) to the
/// N+2 control points of its antiderivative started at zero. Upper-triangular
/// with every nonzero entry equal to (t_next - t_prev)/(N+1).
Eigen::MatrixXd segment_integration_matrix(int order, double t_prev, double t_next);

/// Continuity block for a segment: constant matrix of (t_next - t_prev)/(N+1)
/// with shape (N+1) x (N+2). Row-block k of the composite integration matrix
/// repeats this block for every later segment, carrying the accumulated
/// integral of segment k into their control points.
Eigen::MatrixXd continuity_block(int order, double t_prev, double t_next);

/// Composite integration matrix over the whole grid, shape
/// K(N+1) x K(N+2): diagonal blocks are per-segment integration matrices,
/// strictly-upper blocks are the row segment's continuity block.
Eigen::MatrixXd composite_integration_matrix(const SegmentGrid& grid, int order);

/// Piecewise Bernstein curve of per-segment order N over a SegmentGrid,
/// with D spatial dimensions. Coefficients are stored segment-major:
/// column s*(N+1)+j holds control point j of segment s.
class CompositePoly {
 public:
  CompositePoly(SegmentGrid grid, int order, Eigen::MatrixXd coeffs);

  int order() const { return order_; }
  int dimension() const { return static_cast<int>(coeffs_.rows()); }
  const SegmentGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }

  /// Control points of one segment, D x (N+1).
  Eigen::MatrixXd segment_coeffs(int s) const;

  /// Curve value at t, evaluated per segment with de Casteljau's recursive
  /// convex combinations (stable near segment ends and at high order).
  Eigen::VectorXd value(double t) const;

  /// Values at the K+1 knot times, D x (K+1). Interior knots take the last
  /// control point of the left segment; for curves produced by integral()
  /// this equals the right segment's first control point exactly.
  Eigen::MatrixXd knot_values() const;

  /// Exact antiderivative: order N+1, initial value c at t_0 (one entry per
  /// dimension). Equivalent to coeffs * composite_integration_matrix + c but
  /// computed by prefix sums; continuity at knots holds exactly.
  CompositePoly integral(const Eigen::VectorXd& c) const;

 private:
  SegmentGrid grid_;
  int order_;
  Eigen::MatrixXd coeffs_;  // D x K*(order+1)
};

/// Reduced parameterization of a composite polynomial: the K order-0 control
/// points of the M-th derivative plus M integration constants, per spatial
/// dimension. K + M unknowns per dimension in place of K(N+1).
///
/// Constant ordering: constants column m is c_m, the initial value of
/// derivative level m. c_{M-1} is consumed first when integrating level M to
/// level M-1; c_0 last, producing the position curve. c_0 is therefore the
/// initial position and c_1 the initial velocity.
class ThetaVector {
 public:
  ThetaVector(SegmentGrid grid, Eigen::MatrixXd derivative_cps, Eigen::MatrixXd constants);

  /// Theta whose expanded position curve is the straight line from p0 at t_0
  /// to pf at t_K: zero derivative control points, c_0 = p0,
  /// c_1 = (pf - p0)/(t_K - t_0), higher constants zero. For M = 1 the
  /// velocity has no constant slot, so the derivative control points carry it
  /// instead.
  static ThetaVector straight_line(const Eigen::VectorXd& p0, const Eigen::VectorXd& pf,
                                   const SegmentGrid& grid, int antiderivatives);

  const SegmentGrid& grid() const { return grid_; }
  int dimension() const { return static_cast<int>(derivative_cps_.rows()); }
  int antiderivatives() const { return static_cast<int>(constants_.cols()); }  // M
  int unknowns_per_dimension() const { return grid_.segments() + antiderivatives(); }

  const Eigen::MatrixXd& derivative_cps() const { return derivative_cps_; }  // D x K
  const Eigen::MatrixXd& constants() const { return constants_; }            // D x M

  /// Flat unknown vector for one dimension: [cps_0..cps_{K-1}, c_0..c_{M-1}].
  Eigen::VectorXd flatten_dimension(int d) const;

  /// Inverse of flatten_dimension applied across dimensions: per_dim is
  /// (K+M) x D, column d holding that dimension's unknowns.
  static ThetaVector from_flat(const SegmentGrid& grid, int antiderivatives,
                               const Eigen::MatrixXd& per_dim);

 private:
  SegmentGrid grid_;
  Eigen::MatrixXd derivative_cps_;
  Eigen::MatrixXd constants_;
};

/// All derivative levels of a ThetaVector: level M is the order-0 derivative
/// curve, level 0 the position curve of per-segment order M. Level m-1 is the
/// exact antiderivative of level m with constant c_{m-1}.
class DerivativeStack {
 public:
  explicit DerivativeStack(const ThetaVector& theta);

  int antiderivatives() const { return static_cast<int>(levels_.size()) - 1; }

  /// Curve of derivative order m (0 = position).
  const CompositePoly& level(int m) const;

  /// Knot values of derivative order m, D x (K+1). Level M is discontinuous
  /// at knots; its values use the left segment (segment 0 at t_0).
  Eigen::MatrixXd knots(int m) const;

 private:
  std::vector<CompositePoly> levels_;  // index = derivative order
};

/// Knot values of the m-th derivative, D x (K+1). Throws std::domain_error
/// for m outside 0..M.
Eigen::MatrixXd knots_of_derivative(const ThetaVector& theta, int m);

/// Linear map behind knots_of_derivative for one dimension: a
/// (K+M) x (K+1) matrix T_m with knots_row = theta_dim^T * T_m. Built by
/// expanding unit theta vectors through the integration chain; the NLP
/// assembly uses these to keep knot extraction a single matrix product.
Eigen::MatrixXd knot_extraction_matrix(const SegmentGrid& grid, int antiderivatives, int m);

/// Dense trajectory samples plus the parameterization they came from.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd positions;      // D x n
  Eigen::MatrixXd velocities;     // D x n
  Eigen::MatrixXd accelerations;  // D x n
  ThetaVector theta;
  Eigen::MatrixXd knot_positions;  // D x (K+1)
};

/// Uniformly spaced samples of position, velocity and acceleration over
/// [t_0, t_K]. n_samples >= 2; the first and last samples are the boundary
/// values exactly.
Trajectory sample_trajectory(const ThetaVector& theta, int n_samples);

}  // namespace geobern
