#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "geobern/geodesic_nlp.hpp"
#include "geobern/solver.hpp"
#include "test_util.hpp"

using namespace geobern;
using geobern::testing::random_theta;

namespace {

GaussianField field_2d() {
  return GaussianField(2, 1000.0, 10.0,
                       {{Eigen::Vector2d(1.0, 0.5), 1.0}, {Eigen::Vector2d(-2.0, 1.5), 0.8}});
}

GaussianField flat_2d() { return GaussianField(2, 0.0, 10.0, {}); }

GaussianField obstacle_field_2d(int n_obstacles) {
  Rng rng(909);
  std::vector<Obstacle> obstacles;
  for (int i = 0; i < n_obstacles; ++i) {
    obstacles.push_back(
        {Eigen::Vector2d(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)), rng.uniform(0.5, 1.5)});
  }
  return GaussianField(2, 1000.0, 10.0, std::move(obstacles));
}

}  // namespace

TEST_CASE("geodesic residual vanishes in the expected cases") {
  const GaussianField flat = flat_2d();
  Eigen::Vector2d x(0.3, -0.7), v(1.0, 2.0), a(0.0, 0.0);
  CHECK(geodesic_residual(flat, x, v, a).cwiseAbs().maxCoeff() == 0.0);

  const GaussianField field = field_2d();
  CHECK(geodesic_residual(field, x, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // At the center of a single bump the gradient (and so every Christoffel
  // symbol) is exactly zero; other obstacles would contribute tail terms.
  const GaussianField lone(2, 1000.0, 10.0, {{Eigen::Vector2d(1.0, 0.5), 1.0}});
  CHECK(geodesic_residual(lone, Eigen::Vector2d(1.0, 0.5), v, Eigen::Vector2d::Zero())
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CHECK_THROWS_AS(geodesic_residual(field, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(),
                                    Eigen::Vector3d::Zero()),
                  std::invalid_argument);
}

TEST_CASE("geodesic residual is quadratic in the velocity") {
  const GaussianField field = field_2d();
  Rng rng(111);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::Vector2d x(rng.uniform(-3, 3), rng.uniform(-3, 3));
    Eigen::Vector2d v(rng.uniform(-2, 2), rng.uniform(-2, 2));
    const double scale = rng.uniform(0.1, 3.0);
    const Eigen::VectorXd base = geodesic_residual(field, x, v, Eigen::Vector2d::Zero());
    const Eigen::VectorXd scaled = geodesic_residual(field, x, scale * v, Eigen::Vector2d::Zero());
    CHECK((scaled - scale * scale * base).cwiseAbs().maxCoeff() <=
          1e-10 * (1.0 + base.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("discrete cost of the straight line") {
  Eigen::Vector2d p0(0.0, 0.0), pf(2.0, 0.0);
  for (int segments : {1, 3, 9, 21}) {
    const SegmentGrid grid = SegmentGrid::uniform(0.0, 2.0, segments);
    const ThetaVector line = ThetaVector::straight_line(p0, pf, grid, 3);
    CHECK(discrete_cost(line) == doctest::Approx(2.0).epsilon(1e-14));
  }

  // Coincident endpoints cost nothing.
  const SegmentGrid grid = SegmentGrid::uniform(0.0, 2.0, 4);
  CHECK(discrete_cost(ThetaVector::straight_line(p0, p0, grid, 3)) == 0.0);

  // Doubling every velocity knot quadruples the cost.
  const ThetaVector fast = ThetaVector::straight_line(p0, 2.0 * pf, grid, 3);
  CHECK(discrete_cost(fast) ==
        doctest::Approx(4.0 * discrete_cost(ThetaVector::straight_line(p0, pf, grid, 3)))
            .epsilon(1e-13));
}

TEST_CASE("constraint and variable counts per variant") {
  Eigen::Vector2d p0(-12.0, 0.0), pf(12.0, 1.0);
  const GaussianField field = obstacle_field_2d(12);

  for (int segments : {9, 15, 21, 27, 33, 39, 45}) {
    const int n_knots = segments + 1;

    OCPSpec like = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, segments);
    const NLPInstance like_nlp = build_nlp(like, field);
    CHECK(like_nlp.n_vars == 2 * (segments + 3));
    CHECK(like_nlp.n_eq == 4);
    CHECK(like_nlp.n_ineq == n_knots);

    OCPSpec geo = OCPSpec::make(ProblemVariant::GeodesicConstrained, p0, pf, segments);
    const NLPInstance geo_nlp = build_nlp(geo, field);
    CHECK(geo_nlp.n_eq == 4 + 2 * n_knots);
    CHECK(geo_nlp.n_ineq == n_knots);

    OCPSpec hard = OCPSpec::make(ProblemVariant::HardObstacle, p0, pf, segments);
    const NLPInstance hard_nlp = build_nlp(hard, field);
    CHECK(hard_nlp.n_eq == 4);
    CHECK(hard_nlp.n_ineq == 12 * n_knots + n_knots);
  }

  // M = 2 keeps the documented 22-variable layout at K = 9.
  OCPSpec low = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 9, 2);
  CHECK(build_nlp(low, field).n_vars == 22);

  OCPSpec bad = OCPSpec::make(ProblemVariant::GeodesicConstrained, p0, pf, 9, 2);
  CHECK_THROWS_AS(build_nlp(bad, field), std::invalid_argument);

  const GaussianField field_3d(3, 1000.0, 10.0, {});
  const OCPSpec mismatched = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 9);
  CHECK_THROWS_AS(build_nlp(mismatched, field_3d), std::invalid_argument);
}

TEST_CASE("geodesic-like constraints are a subset of geodesic-constrained") {
  Eigen::Vector2d p0(-10.0, 0.0), pf(10.0, 2.0);
  const GaussianField field = obstacle_field_2d(5);
  const OCPSpec like = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 7);
  const OCPSpec geo = OCPSpec::make(ProblemVariant::GeodesicConstrained, p0, pf, 7);
  const NLPInstance like_nlp = build_nlp(like, field);
  const NLPInstance geo_nlp = build_nlp(geo, field);

  Rng rng(222);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(like_nlp.n_vars);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-3.0, 3.0);
    CHECK(like_nlp.objective(x) == geo_nlp.objective(x));
    CHECK((geo_nlp.eq_constraints(x).head(4) - like_nlp.eq_constraints(x)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((geo_nlp.ineq_constraints(x) - like_nlp.ineq_constraints(x)).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("geodesic equality band defaults and exact mode") {
  Eigen::Vector2d p0(0.0, 0.0), pf(10.0, 0.0);
  const GaussianField field = field_2d();

  OCPSpec geo = OCPSpec::make(ProblemVariant::GeodesicConstrained, p0, pf, 5);
  const NLPInstance banded = build_nlp(geo, field);
  CHECK(banded.eq_band.head(4).cwiseAbs().maxCoeff() == 0.0);
  // v_scale = 1, horizon = 10.
  CHECK(banded.eq_band.tail(12).minCoeff() == doctest::Approx(1e-5).epsilon(1e-12));

  geo.delta = 0.0;
  const NLPInstance exact = build_nlp(geo, field);
  CHECK(exact.eq_band.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decode round-trips the encoding and rho override is honored") {
  Eigen::Vector2d p0(-5.0, 1.0), pf(6.0, -2.0);
  const GaussianField field = field_2d();
  const OCPSpec spec = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 6);
  const NLPInstance nlp = build_nlp(spec, field);
  CHECK(nlp.rho == doctest::Approx(field.clearance_threshold()).epsilon(1e-15));

  OCPSpec overridden = spec;
  overridden.rho_override = 42.0;
  CHECK(build_nlp(overridden, field).rho == 42.0);

  Rng rng(333);
  const ThetaVector theta = random_theta(rng, spec.grid, spec.m_order, 2);
  const Eigen::VectorXd x = nlp.pack(theta);
  const ThetaVector back = nlp.unpack(x);
  CHECK((back.derivative_cps() - theta.derivative_cps()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.constants() - theta.constants()).cwiseAbs().maxCoeff() == 0.0);

  const Trajectory traj = decode_solution(nlp, x, 10);
  CHECK(static_cast<int>(traj.times.size()) == 10 * 6 + 1);
  CHECK_THROWS_AS(decode_solution(nlp, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("analytic jacobians agree with finite differences for every variant") {
  Eigen::Vector2d p0(-9.0, -1.0), pf(9.0, 2.0);
  const GaussianField field = obstacle_field_2d(4);
  Rng rng(444);

  for (ProblemVariant variant : {ProblemVariant::GeodesicConstrained,
                                 ProblemVariant::GeodesicLike, ProblemVariant::HardObstacle}) {
    const OCPSpec spec = OCPSpec::make(variant, p0, pf, 6);
    const NLPInstance nlp = build_nlp(spec, field);
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd x = nlp.pack(ThetaVector::straight_line(p0, pf, spec.grid, spec.m_order));
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += rng.uniform(-0.5, 0.5);
      const double h = 1e-6 * (1.0 + x.norm());
      CHECK(check_gradients(nlp, x, h) <= 1e-5);
    }
  }
}

TEST_CASE("conditioned solver rows: same sublevel set, consistent jacobian") {
  Eigen::Vector2d p0(-9.0, -1.0), pf(9.0, 2.0);
  const GaussianField field = obstacle_field_2d(4);
  const OCPSpec spec = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 6);
  const NLPInstance nlp = build_nlp(spec, field);
  REQUIRE(static_cast<bool>(nlp.solver_ineq));

  Rng rng(666);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x = nlp.pack(ThetaVector::straight_line(p0, pf, spec.grid, 3));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += rng.uniform(-0.5, 0.5);

    const Eigen::VectorXd plain = nlp.ineq_constraints(x);
    const Eigen::VectorXd conditioned = nlp.solver_ineq(x);
    for (Eigen::Index j = 0; j < plain.size(); ++j)
      CHECK((plain(j) <= 0.0) == (conditioned(j) <= 0.0));

    // Check derivatives where the rows can actually activate; deep in the
    // tails the log-sum switches between bumps and the finite-difference
    // reference itself loses accuracy.
    const Eigen::MatrixXd analytic = nlp.solver_ineq_jacobian(x);
    const double h = 1e-6 * (1.0 + x.norm());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd up = x, down = x;
      up(i) += h;
      down(i) -= h;
      const Eigen::VectorXd fd = (nlp.solver_ineq(up) - nlp.solver_ineq(down)) / (2.0 * h);
      for (Eigen::Index j = 0; j < fd.size(); ++j) {
        if (conditioned(j) < -20.0) continue;
        CHECK(std::abs(analytic(j, i) - fd(j)) /
                  std::max({1.0, std::abs(analytic(j, i)), std::abs(fd(j))}) <= 1e-5);
      }
    }
  }

  // No conditioned rows for flat fields (rho = 0 has no log form).
  const NLPInstance flat_nlp = build_nlp(spec, flat_2d());
  CHECK(!static_cast<bool>(flat_nlp.solver_ineq));
}

TEST_CASE("boundary jacobian rows are constant") {
  Eigen::Vector2d p0(0.0, 0.0), pf(5.0, 5.0);
  const GaussianField field = field_2d();
  const OCPSpec spec = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 5);
  const NLPInstance nlp = build_nlp(spec, field);

  Rng rng(555);
  Eigen::VectorXd a(nlp.n_vars), b(nlp.n_vars);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    a(i) = rng.uniform(-2, 2);
    b(i) = rng.uniform(-2, 2);
  }
  const Eigen::MatrixXd ja = nlp.eq_jacobian(a);
  const Eigen::MatrixXd jb = nlp.eq_jacobian(b);
  CHECK((ja - jb).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warmstart fixed point and separation feasibility transfer") {
  const GaussianField field(
      2, 1000.0, 10.0,
      {{Eigen::Vector2d(1.0, 0.0), 1.0}, {Eigen::Vector2d(-2.0, 1.0), 0.7}});
  Eigen::Vector2d p0(-5.0, -2.0), pf(5.0, 2.0);

  // A geodesic-like solution satisfies the hard-obstacle separation rows at
  // the default r_sep = r (clearance equivalence of the rho sublevel set).
  const OCPSpec like_spec = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 7);
  const NLPInstance like_nlp = build_nlp(like_spec, field);
  const SolveReport like_report =
      solve(like_nlp, like_nlp.pack(ThetaVector::straight_line(p0, pf, like_spec.grid, 3)));
  REQUIRE(like_report.status == SolveStatus::Optimal);

  const OCPSpec hard_spec = OCPSpec::make(ProblemVariant::HardObstacle, p0, pf, 7);
  const NLPInstance hard_nlp = build_nlp(hard_spec, field);
  const Eigen::VectorXd guess =
      warmstart_guess(decode_solution(like_nlp, like_report.x_opt), hard_spec);
  const Eigen::VectorXd separation = hard_nlp.ineq_constraints(guess).head(2 * 8);
  CHECK(separation.maxCoeff() <= 1e-6);

  // Restarting a problem from its own solution converges immediately.
  const SolveReport hard_report = solve(hard_nlp, guess);
  REQUIRE(hard_report.status == SolveStatus::Optimal);
  const Eigen::VectorXd fixed_point =
      warmstart_guess(decode_solution(hard_nlp, hard_report.x_opt), hard_spec);
  const SolveReport again = solve(hard_nlp, fixed_point);
  CHECK(again.status == SolveStatus::Optimal);
  CHECK(again.outer_iters <= 3);
}

TEST_CASE("warmstart re-encoding and resampling") {
  Eigen::Vector2d p0(0.0, 0.0), pf(8.0, 0.0);
  const OCPSpec like_spec = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 6);

  const ThetaVector line = ThetaVector::straight_line(p0, pf, like_spec.grid, like_spec.m_order);
  const Trajectory source = sample_trajectory(line, 61);

  // Same grid: exact re-encode of the straight-line theta.
  const Eigen::VectorXd same = warmstart_guess(source, like_spec);
  const NLPInstance nlp = build_nlp(like_spec, flat_2d());
  CHECK((same - nlp.pack(line)).cwiseAbs().maxCoeff() == 0.0);

  // Different K: least-squares refit still reproduces the line closely.
  const OCPSpec finer = OCPSpec::make(ProblemVariant::GeodesicLike, p0, pf, 10);
  const Eigen::VectorXd refit = warmstart_guess(source, finer);
  const NLPInstance finer_nlp = build_nlp(finer, flat_2d());
  const Trajectory decoded = decode_solution(finer_nlp, refit);
  for (std::size_t i = 0; i < decoded.times.size(); ++i) {
    const double s = (decoded.times[i] - 0.0) / 8.0;
    CHECK(std::abs(decoded.positions(0, i) - 8.0 * s) <= 1e-8);
    CHECK(std::abs(decoded.positions(1, i)) <= 1e-8);
  }
}
