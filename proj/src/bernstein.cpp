#include "geobern/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geobern {

namespace {

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out *= static_cast<double>(n - k + i) / i;
  return out;
}

// de Casteljau on one segment; cps is D x (N+1), lambda in [0, 1].
Eigen::VectorXd de_casteljau(const Eigen::MatrixXd& cps, double lambda) {
  Eigen::MatrixXd work = cps;
  for (int r = static_cast<int>(work.cols()) - 1; r >= 1; --r) {
    for (int j = 0; j < r; ++j)
      work.col(j) = (1.0 - lambda) * work.col(j) + lambda * work.col(j + 1);
  }
  return work.col(0);
}

}  // namespace

double basis_eval(int j, int order, double t, double t0, double tf) {
  if (!(t0 < tf)) throw std::domain_error("basis_eval: interval must have t0 < tf");
  if (j < 0 || j > order) throw std::domain_error("basis_eval: index outside 0..order");
  if (t < t0 || t > tf) throw std::domain_error("basis_eval: t outside interval");
  const double span = tf - t0;
  return binomial(order, j) * std::pow(t - t0, j) * std::pow(tf - t, order - j) /
         std::pow(span, order);
}

Eigen::MatrixXd segment_integration_matrix(int order, double t_prev, double t_next) {
  if (!(t_prev < t_next))
    throw std::domain_error("segment_integration_matrix: interval must be increasing");
  const double w = (t_next - t_prev) / (order + 1);
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(order + 1, order + 2);
  for (int i = 0; i <= order; ++i)
    for (int j = i + 1; j <= order + 1; ++j) gamma(i, j) = w;
  return gamma;
}

Eigen::MatrixXd continuity_block(int order, double t_prev, double t_next) {
  if (!(t_prev < t_next)) throw std::domain_error("continuity_block: interval must be increasing");
  const double w = (t_next - t_prev) / (order + 1);
  return Eigen::MatrixXd::Constant(order + 1, order + 2, w);
}

Eigen::MatrixXd composite_integration_matrix(const SegmentGrid& grid, int order) {
  const int k_segments = grid.segments();
  const int rows_per = order + 1;
  const int cols_per = order + 2;
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(k_segments * rows_per, k_segments * cols_per);
  for (int s = 0; s < k_segments; ++s) {
    const double a = grid.knot(s);
    const double b = grid.knot(s + 1);
    big.block(s * rows_per, s * cols_per, rows_per, cols_per) =
        segment_integration_matrix(order, a, b);
    const Eigen::MatrixXd phi = continuity_block(order, a, b);
    for (int l = s + 1; l < k_segments; ++l)
      big.block(s * rows_per, l * cols_per, rows_per, cols_per) = phi;
  }
  return big;
}

CompositePoly::CompositePoly(SegmentGrid grid, int order, Eigen::MatrixXd coeffs)
    : grid_(std::move(grid)), order_(order), coeffs_(std::move(coeffs)) {
  if (order_ < 0) throw std::invalid_argument("CompositePoly: negative order");
  const Eigen::Index expected =
      static_cast<Eigen::Index>(grid_.segments()) * (order_ + 1);
  if (coeffs_.cols() != expected)
    throw std::invalid_argument("CompositePoly: coefficient count does not match grid and order");
  if (coeffs_.rows() < 1) throw std::invalid_argument("CompositePoly: need at least one dimension");
}

Eigen::MatrixXd CompositePoly::segment_coeffs(int s) const {
  return coeffs_.middleCols(static_cast<Eigen::Index>(s) * (order_ + 1), order_ + 1);
}

Eigen::VectorXd CompositePoly::value(double t) const {
  const int s = grid_.segment_of(t);
  const double a = grid_.knot(s);
  const double b = grid_.knot(s + 1);
  const double lambda = (t - a) / (b - a);
  return de_casteljau(segment_coeffs(s), lambda);
}

Eigen::MatrixXd CompositePoly::knot_values() const {
  const int k_segments = grid_.segments();
  Eigen::MatrixXd out(dimension(), k_segments + 1);
  out.col(0) = coeffs_.col(0);
  for (int s = 0; s < k_segments; ++s)
    out.col(s + 1) = coeffs_.col(static_cast<Eigen::Index>(s) * (order_ + 1) + order_);
  return out;
}

CompositePoly CompositePoly::integral(const Eigen::VectorXd& c) const {
  if (c.size() != coeffs_.rows())
    throw std::invalid_argument("CompositePoly::integral: constant dimension mismatch");
  const int k_segments = grid_.segments();
  const int n_out = order_ + 2;
  Eigen::MatrixXd out(dimension(), static_cast<Eigen::Index>(k_segments) * n_out);
  Eigen::VectorXd running = c;
  for (int s = 0; s < k_segments; ++s) {
    const double w = grid_.duration(s) / (order_ + 1);
    const Eigen::Index base_in = static_cast<Eigen::Index>(s) * (order_ + 1);
    const Eigen::Index base_out = static_cast<Eigen::Index>(s) * n_out;
    out.col(base_out) = running;
    for (int j = 1; j <= order_ + 1; ++j)
      out.col(base_out + j) = out.col(base_out + j - 1) + w * coeffs_.col(base_in + j - 1);
    running = out.col(base_out + order_ + 1);
  }
  return CompositePoly(grid_, order_ + 1, std::move(out));
}

ThetaVector::ThetaVector(SegmentGrid grid, Eigen::MatrixXd derivative_cps,
                         Eigen::MatrixXd constants)
    : grid_(std::move(grid)),
      derivative_cps_(std::move(derivative_cps)),
      constants_(std::move(constants)) {
  if (derivative_cps_.cols() != grid_.segments())
    throw std::invalid_argument("ThetaVector: need one derivative control point per segment");
  if (constants_.rows() != derivative_cps_.rows())
    throw std::invalid_argument("ThetaVector: constants dimension mismatch");
  if (constants_.cols() < 1) throw std::invalid_argument("ThetaVector: need at least one constant");
}

ThetaVector ThetaVector::straight_line(const Eigen::VectorXd& p0, const Eigen::VectorXd& pf,
                                       const SegmentGrid& grid, int antiderivatives) {
  if (antiderivatives < 1)
    throw std::invalid_argument("ThetaVector::straight_line: antiderivatives must be >= 1");
  if (p0.size() != pf.size())
    throw std::invalid_argument("ThetaVector::straight_line: boundary dimension mismatch");
  const int dim = static_cast<int>(p0.size());
  const Eigen::VectorXd velocity = (pf - p0) / grid.horizon();
  Eigen::MatrixXd cps = Eigen::MatrixXd::Zero(dim, grid.segments());
  Eigen::MatrixXd constants = Eigen::MatrixXd::Zero(dim, antiderivatives);
  constants.col(0) = p0;
  if (antiderivatives >= 2) {
    constants.col(1) = velocity;
  } else {
    cps.colwise() = velocity;  // M = 1: level 1 is order-0, so it carries the slope
  }
  return ThetaVector(grid, std::move(cps), std::move(constants));
}

Eigen::VectorXd ThetaVector::flatten_dimension(int d) const {
  const int k_segments = grid_.segments();
  const int m_order = antiderivatives();
  Eigen::VectorXd out(k_segments + m_order);
  out.head(k_segments) = derivative_cps_.row(d).transpose();
  out.tail(m_order) = constants_.row(d).transpose();
  return out;
}

ThetaVector ThetaVector::from_flat(const SegmentGrid& grid, int antiderivatives,
                                   const Eigen::MatrixXd& per_dim) {
  const int k_segments = grid.segments();
  if (per_dim.rows() != k_segments + antiderivatives)
    throw std::invalid_argument("ThetaVector::from_flat: row count must be K+M");
  Eigen::MatrixXd cps = per_dim.topRows(k_segments).transpose();
  Eigen::MatrixXd constants = per_dim.bottomRows(antiderivatives).transpose();
  return ThetaVector(grid, std::move(cps), std::move(constants));
}

DerivativeStack::DerivativeStack(const ThetaVector& theta) {
  const int m_order = theta.antiderivatives();
  levels_.reserve(m_order + 1);
  levels_.emplace_back(theta.grid(), 0, theta.derivative_cps());
  for (int m = m_order; m >= 1; --m)
    levels_.emplace_back(levels_.back().integral(theta.constants().col(m - 1)));
  // Stored in build order (level M first); flip to index by derivative order.
  std::reverse(levels_.begin(), levels_.end());
}

const CompositePoly& DerivativeStack::level(int m) const {
  if (m < 0 || m > antiderivatives())
    throw std::domain_error("DerivativeStack::level: order outside 0..M");
  return levels_[static_cast<std::size_t>(m)];
}

Eigen::MatrixXd DerivativeStack::knots(int m) const { return level(m).knot_values(); }

Eigen::MatrixXd knots_of_derivative(const ThetaVector& theta, int m) {
  if (m < 0 || m > theta.antiderivatives())
    throw std::domain_error("knots_of_derivative: order outside 0..M");
  return DerivativeStack(theta).knots(m);
}

Eigen::MatrixXd knot_extraction_matrix(const SegmentGrid& grid, int antiderivatives, int m) {
  if (m < 0 || m > antiderivatives)
    throw std::domain_error("knot_extraction_matrix: order outside 0..M");
  const int k_segments = grid.segments();
  const int n = k_segments + antiderivatives;
  Eigen::MatrixXd extraction(n, k_segments + 1);
  for (int b = 0; b < n; ++b) {
    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(1, n);
    unit(0, b) = 1.0;
    const ThetaVector theta = ThetaVector::from_flat(grid, antiderivatives, unit.transpose());
    extraction.row(b) = knots_of_derivative(theta, m);
  }
  return extraction;
}

Trajectory sample_trajectory(const ThetaVector& theta, int n_samples) {
  if (n_samples < 2) throw std::invalid_argument("sample_trajectory: need at least two samples");
  const DerivativeStack stack(theta);
  const int m_order = theta.antiderivatives();
  const int dim = theta.dimension();
  const double t0 = theta.grid().t0();
  const double tf = theta.grid().tf();

  Trajectory traj{std::vector<double>(n_samples),
                  Eigen::MatrixXd(dim, n_samples),
                  Eigen::MatrixXd::Zero(dim, n_samples),
                  Eigen::MatrixXd::Zero(dim, n_samples),
                  theta,
                  stack.knots(0)};
  for (int i = 0; i < n_samples; ++i) {
    double t = t0 + (tf - t0) * static_cast<double>(i) / (n_samples - 1);
    if (i == n_samples - 1) t = tf;
    traj.times[i] = t;
    traj.positions.col(i) = stack.level(0).value(t);
    if (m_order >= 1) traj.velocities.col(i) = stack.level(1).value(t);
    if (m_order >= 2) traj.accelerations.col(i) = stack.level(2).value(t);
  }
  return traj;
}

}  // namespace geobern
