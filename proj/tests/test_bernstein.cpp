#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "geobern/bernstein.hpp"
#include "test_util.hpp"

using namespace geobern;
using geobern::testing::adaptive_simpson;
using geobern::testing::random_grid;
using geobern::testing::random_poly;
using geobern::testing::random_theta;

TEST_CASE("basis endpoint interpolation and partition of unity") {
  CHECK(basis_eval(0, 3, 0.0, 0.0, 1.0) == 1.0);
  CHECK(basis_eval(3, 3, 1.0, 0.0, 1.0) == 1.0);

  const double t = 0.37 * (2.5 - 0.5) + 0.5;
  double sum = 0.0;
  for (int j = 0; j <= 5; ++j) sum += basis_eval(j, 5, t, 0.5, 2.5);
  CHECK(std::abs(sum - 1.0) <= 1e-12);
}

TEST_CASE("basis rejects bad arguments") {
  CHECK_THROWS_AS(basis_eval(-1, 3, 0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis_eval(4, 3, 0.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis_eval(0, 3, 1.5, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis_eval(0, 3, 0.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("partition of unity over random orders and times") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const int order = rng.uniform_int(0, 10);
    const double t0 = rng.uniform(-3.0, 3.0);
    const double tf = t0 + rng.uniform(0.1, 4.0);
    const double t = rng.uniform(t0, tf);
    double sum = 0.0;
    for (int j = 0; j <= order; ++j) sum += basis_eval(j, order, t, t0, tf);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("segment integration matrix matches the closed form") {
  const Eigen::MatrixXd gamma0 = segment_integration_matrix(0, 0.0, 2.0);
  REQUIRE(gamma0.rows() == 1);
  REQUIRE(gamma0.cols() == 2);
  CHECK(gamma0(0, 0) == 0.0);
  CHECK(gamma0(0, 1) == 2.0);

  const Eigen::MatrixXd gamma1 = segment_integration_matrix(1, 0.0, 1.0);
  Eigen::MatrixXd expected(2, 3);
  expected << 0.0, 0.5, 0.5, 0.0, 0.0, 0.5;
  CHECK((gamma1 - expected).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(segment_integration_matrix(2, 1.0, 1.0), std::domain_error);
}

TEST_CASE("continuity block is constant and scales with the interval") {
  const Eigen::MatrixXd phi0 = continuity_block(0, 0.0, 2.0);
  CHECK(phi0.rows() == 1);
  CHECK(phi0.cols() == 2);
  CHECK(phi0.minCoeff() == 2.0);
  CHECK(phi0.maxCoeff() == 2.0);

  const Eigen::MatrixXd phi1 = continuity_block(1, 0.0, 1.0);
  CHECK(phi1.rows() == 2);
  CHECK(phi1.cols() == 3);
  CHECK(phi1.minCoeff() == 0.5);
  CHECK(phi1.maxCoeff() == 0.5);

  const Eigen::MatrixXd phi_double = continuity_block(1, 0.0, 2.0);
  CHECK((phi_double - 2.0 * phi1).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(continuity_block(1, 2.0, 2.0), std::domain_error);
}

TEST_CASE("composite integration matrix assembly") {
  const SegmentGrid grid({0.0, 1.0, 2.0});
  const Eigen::MatrixXd big = composite_integration_matrix(grid, 0);
  Eigen::MatrixXd expected(2, 4);
  expected << 0, 1, 1, 1, 0, 0, 0, 1;
  CHECK((big - expected).cwiseAbs().maxCoeff() == 0.0);

  // K = 1 degenerates to the single-segment matrix.
  const SegmentGrid one({0.3, 1.7});
  CHECK((composite_integration_matrix(one, 2) - segment_integration_matrix(2, 0.3, 1.7))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // Integrating the constant-1 polynomial over {0,1,2} gives the ramp.
  Eigen::RowVectorXd ones(2);
  ones << 1.0, 1.0;
  const Eigen::RowVectorXd ramp = ones * big;
  Eigen::RowVectorXd ramp_expected(4);
  ramp_expected << 0, 1, 1, 2;
  CHECK((ramp - ramp_expected).cwiseAbs().maxCoeff() == 0.0);

  const CompositePoly constant(grid, 0, Eigen::MatrixXd::Ones(1, 2));
  const CompositePoly integral = constant.integral(Eigen::VectorXd::Zero(1));
  const Eigen::MatrixXd knots = integral.knot_values();
  CHECK(knots(0, 0) == 0.0);
  CHECK(knots(0, 1) == 1.0);
  CHECK(knots(0, 2) == 2.0);
}

TEST_CASE("integral of simple derivatives") {
  const SegmentGrid grid({0.0, 1.0, 2.0});

  // Zero derivative, constant 5.
  const CompositePoly zero(grid, 0, Eigen::MatrixXd::Zero(1, 2));
  const CompositePoly constant = zero.integral(Eigen::VectorXd::Constant(1, 5.0));
  for (double t : {0.0, 0.4, 1.0, 1.9, 2.0}) CHECK(constant.value(t)(0) == 5.0);

  // 2t on [0, 1] in its own Bernstein form integrates to t^2.
  const SegmentGrid unit({0.0, 1.0});
  Eigen::MatrixXd slope(1, 2);
  slope << 0.0, 2.0;
  const CompositePoly ramp(unit, 1, slope);
  const CompositePoly square = ramp.integral(Eigen::VectorXd::Zero(1));
  const Eigen::MatrixXd knots = square.knot_values();
  CHECK(knots(0, 0) == 0.0);
  CHECK(knots(0, 1) == 1.0);
  for (double t : {0.2, 0.5, 0.8})
    CHECK(square.value(t)(0) == doctest::Approx(t * t).epsilon(1e-14));

  CHECK_THROWS_AS(zero.integral(Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST_CASE("integration matches adaptive quadrature on random polynomials") {
  Rng rng(202);
  for (int trial = 0; trial < 20; ++trial) {
    const int segments = rng.uniform_int(1, 4);
    const int order = rng.uniform_int(0, 5);
    const SegmentGrid grid = random_grid(rng, segments);
    const CompositePoly poly = random_poly(rng, grid, order, 1);
    const double c0 = rng.uniform(-1.0, 1.0);
    const CompositePoly integral = poly.integral(Eigen::VectorXd::Constant(1, c0));

    // Integrate segment by segment through the closed-form basis (the raw
    // polynomial may jump at knots, and this keeps the oracle independent of
    // the de Casteljau evaluation path).
    auto integral_oracle = [&](double t) {
      double acc = c0;
      for (int s = 0; s < grid.segments(); ++s) {
        const double lo = grid.knot(s);
        const double hi = std::min(grid.knot(s + 1), t);
        if (hi <= lo) break;
        const Eigen::MatrixXd seg = poly.segment_coeffs(s);
        auto segment_value = [&](double u) {
          double v = 0.0;
          for (int j = 0; j <= order; ++j)
            v += seg(0, j) * basis_eval(j, order, u, grid.knot(s), grid.knot(s + 1));
          return v;
        };
        acc += adaptive_simpson(segment_value, lo, hi);
      }
      return acc;
    };
    for (int probe = 0; probe < 20; ++probe) {
      const double t = rng.uniform(grid.t0(), grid.tf());
      CHECK(std::abs(integral.value(t)(0) - integral_oracle(t)) <= 1e-9);
    }
  }
}

TEST_CASE("endpoint interpolation is exact") {
  Rng rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const SegmentGrid grid = random_grid(rng, rng.uniform_int(1, 5));
    const CompositePoly poly = random_poly(rng, grid, rng.uniform_int(0, 6), 2);
    CHECK((poly.value(grid.t0()) - poly.coeffs().col(0)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((poly.value(grid.tf()) - poly.coeffs().col(poly.coeffs().cols() - 1))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("derivative stack: knot continuity is exact, constants line up") {
  Rng rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const int segments = rng.uniform_int(2, 5);
    const int m_order = rng.uniform_int(1, 4);
    const SegmentGrid grid = random_grid(rng, segments);
    const ThetaVector theta = random_theta(rng, grid, m_order, 2);
    const DerivativeStack stack(theta);

    for (int m = 0; m < m_order; ++m) {
      const CompositePoly& level = stack.level(m);
      const int per_segment = level.order() + 1;
      for (int s = 0; s + 1 < segments; ++s) {
        const Eigen::VectorXd left = level.coeffs().col((s + 1) * per_segment - 1);
        const Eigen::VectorXd right = level.coeffs().col((s + 1) * per_segment);
        CHECK((left - right).cwiseAbs().maxCoeff() == 0.0);
      }
      // Initial value at t0 is the integration constant.
      CHECK((level.value(grid.t0()) - theta.constants().col(m)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(theta.unknowns_per_dimension() == segments + m_order);
  }
}

TEST_CASE("theta expansion: constant and straight-line cases") {
  const SegmentGrid grid({0.0, 1.0, 2.0});

  // M = 1, zero derivative, c_0 = (3, -1): constant position.
  Eigen::MatrixXd constants(2, 1);
  constants << 3.0, -1.0;
  const ThetaVector constant_theta(grid, Eigen::MatrixXd::Zero(2, 2), constants);
  const DerivativeStack stack(constant_theta);
  for (double t : {0.0, 0.7, 1.3, 2.0}) {
    CHECK(stack.level(0).value(t)(0) == 3.0);
    CHECK(stack.level(0).value(t)(1) == -1.0);
  }

  // M = 3 straight line via the guess constructor.
  Eigen::Vector2d p0(0.0, 0.0), pf(2.0, 0.0);
  const ThetaVector line = ThetaVector::straight_line(p0, pf, grid, 3);
  const Eigen::MatrixXd vel_knots = knots_of_derivative(line, 1);
  const Eigen::MatrixXd pos_knots = knots_of_derivative(line, 0);
  for (int k = 0; k <= 2; ++k) {
    CHECK(vel_knots(0, k) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(vel_knots(1, k) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(pos_knots(0, k) == doctest::Approx(1.0 * k).epsilon(1e-15));
  }
  const Eigen::MatrixXd acc_knots = knots_of_derivative(line, 2);
  CHECK(acc_knots.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("numerical differentiation recovers the next stack level") {
  Rng rng(505);
  const SegmentGrid grid = random_grid(rng, 3);
  const ThetaVector theta = random_theta(rng, grid, 3, 2);
  const DerivativeStack stack(theta);
  const double h = 1e-4 * grid.horizon();

  for (int m = 1; m <= 3; ++m) {
    for (int probe = 0; probe < 20; ++probe) {
      const double t = rng.uniform(grid.t0() + 2 * h, grid.tf() - 2 * h);
      for (int d = 0; d < 2; ++d) {
        const double numeric =
            (stack.level(m - 1).value(t + h)(d) - stack.level(m - 1).value(t - h)(d)) / (2.0 * h);
        CHECK(stack.level(m).value(t)(d) == doctest::Approx(numeric).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("knots of derivative use the left segment at the top level") {
  const SegmentGrid grid({0.0, 1.0, 2.0, 3.0});
  Eigen::MatrixXd cps(1, 3);
  cps << 4.0, -1.0, 2.5;
  Eigen::MatrixXd constants = Eigen::MatrixXd::Zero(1, 2);
  const ThetaVector theta(grid, cps, constants);
  const Eigen::MatrixXd top = knots_of_derivative(theta, 2);
  CHECK(top(0, 0) == 4.0);   // t_0 uses the first segment
  CHECK(top(0, 1) == 4.0);   // left limit
  CHECK(top(0, 2) == -1.0);
  CHECK(top(0, 3) == 2.5);

  CHECK_THROWS_AS(knots_of_derivative(theta, 3), std::domain_error);
  CHECK_THROWS_AS(knots_of_derivative(theta, -1), std::domain_error);
}

TEST_CASE("knot extraction matrix reproduces direct evaluation") {
  Rng rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    const int segments = rng.uniform_int(1, 5);
    const int m_order = rng.uniform_int(1, 4);
    const SegmentGrid grid = random_grid(rng, segments);
    const ThetaVector theta = random_theta(rng, grid, m_order, 2);
    for (int m = 0; m <= m_order; ++m) {
      const Eigen::MatrixXd extraction = knot_extraction_matrix(grid, m_order, m);
      const Eigen::MatrixXd direct = knots_of_derivative(theta, m);
      for (int d = 0; d < 2; ++d) {
        const Eigen::RowVectorXd via_matrix =
            theta.flatten_dimension(d).transpose() * extraction;
        CHECK((via_matrix - direct.row(d)).cwiseAbs().maxCoeff() <= 1e-13);
      }
    }
  }
}

TEST_CASE("sampling hits knots and boundaries") {
  const SegmentGrid grid({0.0, 1.0, 2.0});
  Eigen::Vector2d p0(-1.0, 0.5), pf(3.0, -2.0);
  const ThetaVector line = ThetaVector::straight_line(p0, pf, grid, 3);

  const Trajectory traj = sample_trajectory(line, 2 * grid.segments() + 1);
  const DerivativeStack stack(line);
  for (int k = 0; k <= grid.segments(); ++k) {
    const int i = 2 * k;
    CHECK((traj.positions.col(i) - stack.knots(0).col(k)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((traj.velocities.col(i) - stack.knots(1).col(k)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((traj.accelerations.col(i) - stack.knots(2).col(k)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  const Trajectory ends = sample_trajectory(line, 2);
  CHECK((ends.positions.col(0) - p0).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((ends.positions.col(1) - pf).cwiseAbs().maxCoeff() <= 1e-12);

  CHECK_THROWS_AS(sample_trajectory(line, 1), std::invalid_argument);
}

TEST_CASE("straight line guess degenerates cleanly") {
  const SegmentGrid grid({0.0, 2.0});
  Eigen::Vector2d p(1.0, 1.0);
  const ThetaVector still = ThetaVector::straight_line(p, p, grid, 3);
  const Trajectory traj = sample_trajectory(still, 5);
  for (int i = 0; i < 5; ++i)
    CHECK((traj.positions.col(i) - p).cwiseAbs().maxCoeff() == 0.0);

  // M = 1 carries the slope in the derivative control points instead.
  Eigen::Vector2d pf(3.0, 1.0);
  const ThetaVector low_order = ThetaVector::straight_line(p, pf, grid, 1);
  const Trajectory low_traj = sample_trajectory(low_order, 2);
  CHECK((low_traj.positions.col(0) - p).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((low_traj.positions.col(1) - pf).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(SegmentGrid({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SegmentGrid({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(SegmentGrid({0.0, 2.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(SegmentGrid::uniform(0.0, 1.0, 0), std::invalid_argument);

  const SegmentGrid grid = SegmentGrid::uniform(0.0, 3.0, 3);
  CHECK(grid.segment_of(-1.0) == 0);
  CHECK(grid.segment_of(0.0) == 0);
  CHECK(grid.segment_of(1.0) == 1);
  CHECK(grid.segment_of(3.0) == 2);
  CHECK(grid.segment_of(9.0) == 2);
}
