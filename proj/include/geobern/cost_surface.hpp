#pragma once

#include <Eigen/Core>
#include <vector>

namespace geobern {

struct Obstacle {
  Eigen::VectorXd center;
  double radius = 1.0;  // minimum clearance distance r > 0
};

/// Christoffel symbols of a Monge patch at one point: gamma[k](i, j) holds
/// the symbol with upper index k, symmetric in (i, j).
struct ChristoffelTensor {
  std::vector<Eigen::MatrixXd> gamma;

  int dimension() const { return static_cast<int>(gamma.size()); }
  double operator()(int k, int i, int j) const { return gamma[k](i, j); }
};

/// Obstacle field encoded as a sum of Gaussian bumps,
///
///   f(p) = A * sum_i exp(-kappa * |p - c_i|^2 / (2 r_i^2)),
///
/// read as the height of a Monge patch over the plan space. All evaluation
/// is closed form, including derivatives up to third order. Objects are
/// immutable and evaluation is pure, so fields can be shared across threads.
class GaussianField {
 public:
  GaussianField(int dimension, double amplitude, double sharpness,
                std::vector<Obstacle> obstacles);

  int dimension() const { return dimension_; }
  double amplitude() const { return amplitude_; }
  double sharpness() const { return sharpness_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  double value(const Eigen::VectorXd& p) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& p) const;

  /// Third-derivative tensor, returned as D matrices with
  /// third[c](a, b) = d^3 f / dx_a dx_b dx_c. Needed for exact Jacobians of
  /// the geodesic residual (the Christoffel symbols differentiate once more).
  std::vector<Eigen::MatrixXd> third_derivative(const Eigen::VectorXd& p) const;

  /// Metric factor g = 1 + |grad f|^2, the squared norm of the patch normal.
  double metric(const Eigen::VectorXd& p) const;

  /// Gamma^k_ij = (1/g) * f_{x_i x_j} * f_{x_k}.
  ChristoffelTensor christoffel(const Eigen::VectorXd& p) const;

  /// Clearance level rho = A * exp(-kappa/2). A single bump evaluates to
  /// exactly rho at distance r from its center, so f <= rho keeps at least
  /// distance r_i from every obstacle (superposition only adds cost).
  double clearance_threshold() const;

 private:
  void check_point(const Eigen::VectorXd& p) const;

  int dimension_;
  double amplitude_;
  double sharpness_;
  std::vector<Obstacle> obstacles_;
};

/// Gaussian variance encoding an obstacle radius: sigma = 2 * kappa * r^2,
/// the variance for which the surface curvature changes sign at distance r.
double sigma_from_radius(double radius, double kappa);

/// Gaussian curvature of the single-bump surface A*exp(-kappa*d^2/sigma) with
/// sigma = sigma_from_radius(r, kappa). Positive at the peak, zero exactly at
/// distance sqrt(sigma/(2 kappa)) = r, negative beyond. Diagnostic only;
/// rejects multi-obstacle fields.
double gaussian_curvature_2d(const GaussianField& field, const Eigen::Vector2d& p);

/// Gauss-Kronecker curvature of the single-bump hypersurface in 3D:
/// det(Hess f) / (1 + |grad f|^2)^{5/2}. Negative at the peak, zero at
/// distance r, sign change mirrors the 2D diagnostic.
double gauss_kronecker_3d(const GaussianField& field, const Eigen::Vector3d& p);

}  // namespace geobern
