#include "geobern/cost_surface.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace geobern {

GaussianField::GaussianField(int dimension, double amplitude, double sharpness,
                             std::vector<Obstacle> obstacles)
    : dimension_(dimension),
      amplitude_(amplitude),
      sharpness_(sharpness),
      obstacles_(std::move(obstacles)) {
  if (dimension_ != 2 && dimension_ != 3)
    throw std::invalid_argument("GaussianField: dimension must be 2 or 3");
  if (amplitude_ < 0.0) throw std::invalid_argument("GaussianField: amplitude must be >= 0");
  if (!(sharpness_ > 0.0)) throw std::invalid_argument("GaussianField: sharpness must be > 0");
  for (const Obstacle& obs : obstacles_) {
    if (obs.center.size() != dimension_)
      throw std::invalid_argument("GaussianField: obstacle center dimension mismatch");
    if (!(obs.radius > 0.0)) throw std::invalid_argument("GaussianField: obstacle radius must be > 0");
  }
}

void GaussianField::check_point(const Eigen::VectorXd& p) const {
  if (p.size() != dimension_) throw std::invalid_argument("GaussianField: point dimension mismatch");
}

double GaussianField::value(const Eigen::VectorXd& p) const {
  check_point(p);
  double sum = 0.0;
  for (const Obstacle& obs : obstacles_) {
    const double d2 = (p - obs.center).squaredNorm();
    sum += std::exp(-sharpness_ * d2 / (2.0 * obs.radius * obs.radius));
  }
  return amplitude_ * sum;
}

Eigen::VectorXd GaussianField::gradient(const Eigen::VectorXd& p) const {
  check_point(p);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dimension_);
  for (const Obstacle& obs : obstacles_) {
    const Eigen::VectorXd y = p - obs.center;
    const double alpha = sharpness_ / (2.0 * obs.radius * obs.radius);
    const double bump = amplitude_ * std::exp(-alpha * y.squaredNorm());
    grad += -2.0 * alpha * bump * y;
  }
  return grad;
}

Eigen::MatrixXd GaussianField::hessian(const Eigen::VectorXd& p) const {
  check_point(p);
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const Obstacle& obs : obstacles_) {
    const Eigen::VectorXd y = p - obs.center;
    const double alpha = sharpness_ / (2.0 * obs.radius * obs.radius);
    const double bump = amplitude_ * std::exp(-alpha * y.squaredNorm());
    // Materialize the outer product before scaling so the result stays
    // bitwise symmetric (scalars folded into one product operand round
    // differently per side).
    const Eigen::MatrixXd outer = y * y.transpose();
    hess += (4.0 * alpha * alpha * bump) * outer;
    hess.diagonal().array() -= 2.0 * alpha * bump;
  }
  return hess;
}

std::vector<Eigen::MatrixXd> GaussianField::third_derivative(const Eigen::VectorXd& p) const {
  check_point(p);
  std::vector<Eigen::MatrixXd> third(dimension_,
                                     Eigen::MatrixXd::Zero(dimension_, dimension_));
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dimension_, dimension_);
  for (const Obstacle& obs : obstacles_) {
    const Eigen::VectorXd y = p - obs.center;
    const double alpha = sharpness_ / (2.0 * obs.radius * obs.radius);
    const double bump = amplitude_ * std::exp(-alpha * y.squaredNorm());
    const Eigen::MatrixXd outer = y * y.transpose();
    for (int c = 0; c < dimension_; ++c) {
      third[c] += (-8.0 * alpha * alpha * alpha * bump * y(c)) * outer +
                  (4.0 * alpha * alpha * bump) *
                      (y(c) * eye + y * eye.row(c) + eye.col(c) * y.transpose());
    }
  }
  return third;
}

double GaussianField::metric(const Eigen::VectorXd& p) const {
  return 1.0 + gradient(p).squaredNorm();
}

ChristoffelTensor GaussianField::christoffel(const Eigen::VectorXd& p) const {
  const Eigen::VectorXd grad = gradient(p);
  const Eigen::MatrixXd hess = hessian(p);
  const double g = 1.0 + grad.squaredNorm();
  ChristoffelTensor tensor;
  tensor.gamma.reserve(dimension_);
  for (int k = 0; k < dimension_; ++k) tensor.gamma.push_back((grad(k) / g) * hess);
  return tensor;
}

double GaussianField::clearance_threshold() const {
  return amplitude_ * std::exp(-sharpness_ / 2.0);
}

double sigma_from_radius(double radius, double kappa) {
  if (!(radius > 0.0)) throw std::domain_error("sigma_from_radius: radius must be > 0");
  if (!(kappa > 0.0)) throw std::domain_error("sigma_from_radius: kappa must be > 0");
  return 2.0 * kappa * radius * radius;
}

namespace {

const Obstacle& single_obstacle(const GaussianField& field, int dimension) {
  if (field.dimension() != dimension)
    throw std::invalid_argument("curvature diagnostic: field dimension mismatch");
  if (field.obstacles().size() != 1)
    throw std::invalid_argument("curvature diagnostic: requires exactly one obstacle");
  return field.obstacles().front();
}

// Derivatives of the single-bump surface A*exp(-kappa*d^2/sigma) at squared
// distance d2; decay rate alpha = kappa/sigma.
struct BumpDerivs {
  double bump;   // surface value
  double alpha;  // decay rate
};

BumpDerivs bump_derivs(const GaussianField& field, const Obstacle& obs, double d2) {
  const double sigma = sigma_from_radius(obs.radius, field.sharpness());
  const double alpha = field.sharpness() / sigma;
  return {field.amplitude() * std::exp(-alpha * d2), alpha};
}

}  // namespace

double gaussian_curvature_2d(const GaussianField& field, const Eigen::Vector2d& p) {
  const Obstacle& obs = single_obstacle(field, 2);
  const Eigen::Vector2d y = p - Eigen::Vector2d(obs.center);
  const auto [bump, alpha] = bump_derivs(field, obs, y.squaredNorm());

  const double fu = -2.0 * alpha * y.x() * bump;
  const double fv = -2.0 * alpha * y.y() * bump;
  const double fuu = bump * (4.0 * alpha * alpha * y.x() * y.x() - 2.0 * alpha);
  const double fvv = bump * (4.0 * alpha * alpha * y.y() * y.y() - 2.0 * alpha);
  const double fuv = bump * 4.0 * alpha * alpha * y.x() * y.y();

  const double numerator = fuu * fvv - fuv * fuv;
  const double denominator = 1.0 + fu * fu + fv * fv;
  return numerator / (denominator * denominator);
}

double gauss_kronecker_3d(const GaussianField& field, const Eigen::Vector3d& p) {
  const Obstacle& obs = single_obstacle(field, 3);
  const Eigen::Vector3d y = p - Eigen::Vector3d(obs.center);
  const auto [bump, alpha] = bump_derivs(field, obs, y.squaredNorm());

  const Eigen::Vector3d grad = -2.0 * alpha * bump * y;
  const Eigen::Matrix3d hess =
      bump * (4.0 * alpha * alpha * y * y.transpose() - 2.0 * alpha * Eigen::Matrix3d::Identity());
  return hess.determinant() / std::pow(1.0 + grad.squaredNorm(), 2.5);
}

}  // namespace geobern
