#include "geobern/geodesic_nlp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace geobern {

std::string to_string(ProblemVariant variant) {
  switch (variant) {
    case ProblemVariant::GeodesicConstrained: return "geodesic";
    case ProblemVariant::GeodesicLike: return "geodesic-like";
    case ProblemVariant::HardObstacle: return "hard";
  }
  return "unknown";
}

ProblemVariant variant_from_string(const std::string& name) {
  if (name == "geodesic") return ProblemVariant::GeodesicConstrained;
  if (name == "geodesic-like") return ProblemVariant::GeodesicLike;
  if (name == "hard") return ProblemVariant::HardObstacle;
  throw std::invalid_argument("unknown problem variant: " + name);
}

OCPSpec OCPSpec::make(ProblemVariant variant, const Eigen::VectorXd& p0,
                      const Eigen::VectorXd& pf, int segments, int m_order, double v_nominal) {
  if (p0.size() != pf.size()) throw std::invalid_argument("OCPSpec: boundary dimension mismatch");
  if (!(v_nominal > 0.0)) throw std::invalid_argument("OCPSpec: v_nominal must be > 0");
  const double dist = (pf - p0).norm();
  if (!(dist > 0.0))
    throw std::invalid_argument("OCPSpec: coincident boundary points leave no mission time");
  OCPSpec spec;
  spec.p0 = p0;
  spec.pf = pf;
  spec.grid = SegmentGrid::uniform(0.0, dist / v_nominal, segments);
  spec.m_order = m_order;
  spec.variant = variant;
  return spec;
}

Eigen::VectorXd geodesic_residual(const GaussianField& field, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& v, const Eigen::VectorXd& a) {
  if (x.size() != field.dimension() || v.size() != x.size() || a.size() != x.size())
    throw std::invalid_argument("geodesic_residual: state dimension mismatch");
  const Eigen::VectorXd grad = field.gradient(x);
  const Eigen::MatrixXd hess = field.hessian(x);
  const double g = 1.0 + grad.squaredNorm();
  const double quad = v.dot(hess * v);
  return a + (quad / g) * grad;
}

double discrete_cost(const ThetaVector& theta) {
  const Eigen::MatrixXd velocity_knots = knots_of_derivative(theta, 1);
  const double weight = theta.grid().horizon() / (theta.grid().segments() + 1);
  return weight * velocity_knots.squaredNorm();
}

namespace {

// Everything the constraint callables need, shared through one immutable
// context so the NLPInstance stays cheap to copy.
struct NlpContext {
  GaussianField field;
  Eigen::VectorXd p0, pf;
  SegmentGrid grid;
  int dim, k_segments, m_order, stride, n_vars;
  ProblemVariant variant;
  double rho, delta, v_max;
  std::vector<double> separation;  // per-obstacle separation radius
  double time_weight;
  Eigen::MatrixXd T0, T1, T2;  // knot extraction, (K+M) x (K+1)

  Eigen::MatrixXd knots(const Eigen::VectorXd& x, const Eigen::MatrixXd& extraction) const {
    Eigen::MatrixXd out(dim, k_segments + 1);
    for (int d = 0; d < dim; ++d)
      out.row(d) = x.segment(static_cast<Eigen::Index>(d) * stride, stride).transpose() * extraction;
    return out;
  }
};

using Ctx = std::shared_ptr<const NlpContext>;

Eigen::VectorXd eval_eq(const Ctx& ctx, const Eigen::VectorXd& x, int n_eq) {
  Eigen::VectorXd c(n_eq);
  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  c.head(ctx->dim) = pos.col(0) - ctx->p0;
  c.segment(ctx->dim, ctx->dim) = pos.col(ctx->k_segments) - ctx->pf;
  if (ctx->variant == ProblemVariant::GeodesicConstrained) {
    const Eigen::MatrixXd vel = ctx->knots(x, ctx->T1);
    const Eigen::MatrixXd acc = ctx->knots(x, ctx->T2);
    for (int k = 0; k <= ctx->k_segments; ++k) {
      const Eigen::VectorXd res =
          geodesic_residual(ctx->field, pos.col(k), vel.col(k), acc.col(k));
      c.segment(2 * ctx->dim + static_cast<Eigen::Index>(k) * ctx->dim, ctx->dim) = res;
    }
  }
  return c;
}

Eigen::VectorXd eval_ineq(const Ctx& ctx, const Eigen::VectorXd& x, int n_ineq) {
  Eigen::VectorXd h(n_ineq);
  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  const int n_knots = ctx->k_segments + 1;
  if (ctx->variant == ProblemVariant::HardObstacle) {
    const auto& obstacles = ctx->field.obstacles();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      for (int k = 0; k < n_knots; ++k) {
        const double dist = (pos.col(k) - obstacles[i].center).norm();
        h(static_cast<Eigen::Index>(i) * n_knots + k) = ctx->separation[i] - dist;
      }
    }
    const Eigen::MatrixXd vel = ctx->knots(x, ctx->T1);
    const Eigen::Index base = static_cast<Eigen::Index>(obstacles.size()) * n_knots;
    for (int k = 0; k < n_knots; ++k) h(base + k) = vel.col(k).norm() - ctx->v_max;
  } else {
    for (int k = 0; k < n_knots; ++k) h(k) = ctx->field.value(pos.col(k)) - ctx->rho;
  }
  return h;
}

Eigen::MatrixXd eval_eq_jacobian(const Ctx& ctx, const Eigen::VectorXd& x, int n_eq) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_eq, ctx->n_vars);
  for (int d = 0; d < ctx->dim; ++d) {
    const Eigen::Index block = static_cast<Eigen::Index>(d) * ctx->stride;
    jac.row(d).segment(block, ctx->stride) = ctx->T0.col(0).transpose();
    jac.row(ctx->dim + d).segment(block, ctx->stride) =
        ctx->T0.col(ctx->k_segments).transpose();
  }
  if (ctx->variant != ProblemVariant::GeodesicConstrained) return jac;

  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  const Eigen::MatrixXd vel = ctx->knots(x, ctx->T1);
  for (int k = 0; k <= ctx->k_segments; ++k) {
    const Eigen::VectorXd xk = pos.col(k);
    const Eigen::VectorXd vk = vel.col(k);
    const Eigen::VectorXd grad = ctx->field.gradient(xk);
    const Eigen::MatrixXd hess = ctx->field.hessian(xk);
    const std::vector<Eigen::MatrixXd> third = ctx->field.third_derivative(xk);
    const double g = 1.0 + grad.squaredNorm();
    const double quad = vk.dot(hess * vk);
    const Eigen::VectorXd hess_v = hess * vk;          // d quad / dv = 2 * hess_v
    const Eigen::VectorXd g_grad = 2.0 * (hess * grad);  // dg/dx

    for (int d = 0; d < ctx->dim; ++d) {
      const Eigen::Index row = 2 * ctx->dim + static_cast<Eigen::Index>(k) * ctx->dim + d;
      for (int e = 0; e < ctx->dim; ++e) {
        const Eigen::Index block = static_cast<Eigen::Index>(e) * ctx->stride;
        // Acceleration enters linearly through its own dimension only.
        if (e == d) jac.row(row).segment(block, ctx->stride) += ctx->T2.col(k).transpose();
        // Velocity chain: d/dv_e [grad_d * quad / g].
        const double dq_dv = (grad(d) / g) * 2.0 * hess_v(e);
        jac.row(row).segment(block, ctx->stride) += dq_dv * ctx->T1.col(k).transpose();
        // Position chain: quotient rule over grad_d, quad and g.
        const double dquad_dx = vk.dot(third[e] * vk);
        const double dq_dx =
            (hess(d, e) * quad + grad(d) * dquad_dx) / g - grad(d) * quad * g_grad(e) / (g * g);
        jac.row(row).segment(block, ctx->stride) += dq_dx * ctx->T0.col(k).transpose();
      }
    }
  }
  return jac;
}

// Conditioned solver rows for the field constraint: log f(X_k) - log rho.
// Same sublevel set as f - rho but quadratic in distance, so the penalty
// curvature stays within a few orders of magnitude. Far-field values clamp
// well below activation.
Eigen::VectorXd eval_log_field_rows(const Ctx& ctx, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  const int n_knots = ctx->k_segments + 1;
  const double floor_value = ctx->rho * 1e-60;
  Eigen::VectorXd rows(n_knots);
  for (int k = 0; k < n_knots; ++k)
    rows(k) = std::log(std::max(ctx->field.value(pos.col(k)), floor_value)) - std::log(ctx->rho);
  return rows;
}

Eigen::MatrixXd eval_log_field_jacobian(const Ctx& ctx, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  const int n_knots = ctx->k_segments + 1;
  const double floor_value = ctx->rho * 1e-60;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_knots, ctx->n_vars);
  for (int k = 0; k < n_knots; ++k) {
    const double value = std::max(ctx->field.value(pos.col(k)), floor_value);
    const Eigen::VectorXd grad = ctx->field.gradient(pos.col(k)) / value;
    for (int e = 0; e < ctx->dim; ++e)
      jac.row(k).segment(static_cast<Eigen::Index>(e) * ctx->stride, ctx->stride) =
          grad(e) * ctx->T0.col(k).transpose();
  }
  return jac;
}

Eigen::MatrixXd eval_ineq_jacobian(const Ctx& ctx, const Eigen::VectorXd& x, int n_ineq) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_ineq, ctx->n_vars);
  const Eigen::MatrixXd pos = ctx->knots(x, ctx->T0);
  const int n_knots = ctx->k_segments + 1;
  if (ctx->variant == ProblemVariant::HardObstacle) {
    const auto& obstacles = ctx->field.obstacles();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      for (int k = 0; k < n_knots; ++k) {
        const Eigen::VectorXd offset = pos.col(k) - obstacles[i].center;
        const double dist = offset.norm();
        if (dist < 1e-12) continue;  // kink of the distance; leave a zero row
        const Eigen::Index row = static_cast<Eigen::Index>(i) * n_knots + k;
        for (int e = 0; e < ctx->dim; ++e)
          jac.row(row).segment(static_cast<Eigen::Index>(e) * ctx->stride, ctx->stride) =
              (-offset(e) / dist) * ctx->T0.col(k).transpose();
      }
    }
    const Eigen::MatrixXd vel = ctx->knots(x, ctx->T1);
    const Eigen::Index base = static_cast<Eigen::Index>(obstacles.size()) * n_knots;
    for (int k = 0; k < n_knots; ++k) {
      const double speed = vel.col(k).norm();
      if (speed < 1e-12) continue;
      for (int e = 0; e < ctx->dim; ++e)
        jac.row(base + k).segment(static_cast<Eigen::Index>(e) * ctx->stride, ctx->stride) =
            (vel(e, k) / speed) * ctx->T1.col(k).transpose();
    }
  } else {
    for (int k = 0; k < n_knots; ++k) {
      const Eigen::VectorXd grad = ctx->field.gradient(pos.col(k));
      for (int e = 0; e < ctx->dim; ++e)
        jac.row(k).segment(static_cast<Eigen::Index>(e) * ctx->stride, ctx->stride) =
            grad(e) * ctx->T0.col(k).transpose();
    }
  }
  return jac;
}

}  // namespace

NLPInstance build_nlp(const OCPSpec& spec, const GaussianField& field) {
  if (spec.dimension() != field.dimension())
    throw std::invalid_argument("build_nlp: spec and field dimensions disagree");
  if (spec.pf.size() != spec.p0.size())
    throw std::invalid_argument("build_nlp: boundary dimension mismatch");
  if (spec.m_order < 1) throw std::invalid_argument("build_nlp: m_order must be >= 1");
  if (spec.variant == ProblemVariant::GeodesicConstrained && spec.m_order < 3)
    throw std::invalid_argument(
        "build_nlp: geodesic constraints need acceleration knots (m_order >= 3)");

  auto ctx = std::make_shared<NlpContext>(NlpContext{
      field, spec.p0, spec.pf, spec.grid, spec.dimension(), spec.grid.segments(), spec.m_order,
      spec.grid.segments() + spec.m_order,
      spec.dimension() * (spec.grid.segments() + spec.m_order), spec.variant,
      0.0, 0.0, 0.0, {}, spec.grid.horizon() / (spec.grid.segments() + 1),
      knot_extraction_matrix(spec.grid, spec.m_order, 0),
      knot_extraction_matrix(spec.grid, spec.m_order, 1),
      spec.m_order >= 2 ? knot_extraction_matrix(spec.grid, spec.m_order, 2)
                        : Eigen::MatrixXd::Zero(spec.grid.segments() + spec.m_order,
                                                spec.grid.segments() + 1)});

  ctx->rho = spec.rho_override >= 0.0 ? spec.rho_override : field.clearance_threshold();
  const double v_scale = (spec.pf - spec.p0).norm() / spec.grid.horizon();
  ctx->delta = spec.delta >= 0.0 ? spec.delta : 1e-4 * v_scale * v_scale / spec.grid.horizon();
  ctx->v_max = spec.v_max >= 0.0 ? spec.v_max : 2.0 * v_scale;
  for (const Obstacle& obs : field.obstacles())
    ctx->separation.push_back(spec.r_sep >= 0.0 ? spec.r_sep : obs.radius);

  const int n_knots = ctx->k_segments + 1;
  NLPInstance nlp;
  nlp.n_vars = ctx->n_vars;
  nlp.grid = spec.grid;
  nlp.dimension = ctx->dim;
  nlp.m_order = spec.m_order;
  nlp.variant = spec.variant;
  nlp.rho = ctx->rho;

  nlp.n_eq = 2 * ctx->dim;
  if (spec.variant == ProblemVariant::GeodesicConstrained) nlp.n_eq += ctx->dim * n_knots;
  if (spec.variant == ProblemVariant::HardObstacle)
    nlp.n_ineq = static_cast<int>(field.obstacles().size()) * n_knots + n_knots;
  else
    nlp.n_ineq = n_knots;

  nlp.eq_band = Eigen::VectorXd::Zero(nlp.n_eq);
  if (spec.variant == ProblemVariant::GeodesicConstrained)
    nlp.eq_band.tail(ctx->dim * n_knots).setConstant(ctx->delta);

  const int n_eq = nlp.n_eq;
  const int n_ineq = nlp.n_ineq;
  const double weight = ctx->time_weight;

  nlp.objective = [ctx, weight](const Eigen::VectorXd& x) {
    return weight * ctx->knots(x, ctx->T1).squaredNorm();
  };
  nlp.objective_gradient = [ctx, weight](const Eigen::VectorXd& x) {
    const Eigen::MatrixXd vel = ctx->knots(x, ctx->T1);
    Eigen::VectorXd grad(ctx->n_vars);
    for (int d = 0; d < ctx->dim; ++d)
      grad.segment(static_cast<Eigen::Index>(d) * ctx->stride, ctx->stride) =
          2.0 * weight * (ctx->T1 * vel.row(d).transpose());
    return grad;
  };
  // The running cost is an exact quadratic form in theta; hand the constant
  // Hessian to the solver so its inner model is exact on the objective.
  Eigen::MatrixXd hess_obj = Eigen::MatrixXd::Zero(ctx->n_vars, ctx->n_vars);
  const Eigen::MatrixXd block = 2.0 * weight * (ctx->T1 * ctx->T1.transpose());
  for (int d = 0; d < ctx->dim; ++d)
    hess_obj.block(static_cast<Eigen::Index>(d) * ctx->stride,
                   static_cast<Eigen::Index>(d) * ctx->stride, ctx->stride, ctx->stride) = block;
  nlp.objective_hessian = [hess_obj](const Eigen::VectorXd&) { return hess_obj; };

  nlp.eq_constraints = [ctx, n_eq](const Eigen::VectorXd& x) { return eval_eq(ctx, x, n_eq); };
  nlp.ineq_constraints = [ctx, n_ineq](const Eigen::VectorXd& x) {
    return eval_ineq(ctx, x, n_ineq);
  };
  nlp.eq_jacobian = [ctx, n_eq](const Eigen::VectorXd& x) {
    return eval_eq_jacobian(ctx, x, n_eq);
  };
  nlp.ineq_jacobian = [ctx, n_ineq](const Eigen::VectorXd& x) {
    return eval_ineq_jacobian(ctx, x, n_ineq);
  };
  if (spec.variant != ProblemVariant::HardObstacle && ctx->rho > 0.0 &&
      !field.obstacles().empty() && field.amplitude() > 0.0) {
    nlp.solver_ineq = [ctx](const Eigen::VectorXd& x) { return eval_log_field_rows(ctx, x); };
    nlp.solver_ineq_jacobian = [ctx](const Eigen::VectorXd& x) {
      return eval_log_field_jacobian(ctx, x);
    };
  }
  return nlp;
}

ThetaVector NLPInstance::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != n_vars) throw std::invalid_argument("NLPInstance::unpack: length mismatch");
  const int stride = grid.segments() + m_order;
  Eigen::MatrixXd per_dim(stride, dimension);
  for (int d = 0; d < dimension; ++d)
    per_dim.col(d) = x.segment(static_cast<Eigen::Index>(d) * stride, stride);
  return ThetaVector::from_flat(grid, m_order, per_dim);
}

Eigen::VectorXd NLPInstance::pack(const ThetaVector& theta) const {
  if (!(theta.grid() == grid) || theta.antiderivatives() != m_order ||
      theta.dimension() != dimension)
    throw std::invalid_argument("NLPInstance::pack: layout mismatch");
  const int stride = grid.segments() + m_order;
  Eigen::VectorXd x(n_vars);
  for (int d = 0; d < dimension; ++d)
    x.segment(static_cast<Eigen::Index>(d) * stride, stride) = theta.flatten_dimension(d);
  return x;
}

Trajectory decode_solution(const NLPInstance& nlp, const Eigen::VectorXd& x_opt,
                           int samples_per_segment) {
  if (x_opt.size() != nlp.n_vars)
    throw std::invalid_argument("decode_solution: decision vector length mismatch");
  const ThetaVector theta = nlp.unpack(x_opt);
  return sample_trajectory(theta, samples_per_segment * nlp.grid.segments() + 1);
}

Eigen::VectorXd warmstart_guess(const Trajectory& source, const OCPSpec& target_spec) {
  if (source.theta.dimension() != target_spec.dimension())
    throw std::invalid_argument("warmstart_guess: dimension mismatch");
  const int stride = target_spec.grid.segments() + target_spec.m_order;
  const int dim = target_spec.dimension();

  if (source.theta.grid() == target_spec.grid &&
      source.theta.antiderivatives() == target_spec.m_order) {
    Eigen::VectorXd x(dim * stride);
    for (int d = 0; d < dim; ++d)
      x.segment(static_cast<Eigen::Index>(d) * stride, stride) =
          source.theta.flatten_dimension(d);
    return x;
  }

  // Grids differ: fit theta by least squares on the source's dense position
  // samples, mapped affinely onto the target horizon.
  const int n_samples = static_cast<int>(source.times.size());
  const double s0 = source.times.front();
  const double s_span = source.times.back() - s0;
  Eigen::MatrixXd design(n_samples, stride);
  for (int b = 0; b < stride; ++b) {
    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(stride, 1);
    unit(b, 0) = 1.0;
    const ThetaVector basis_theta =
        ThetaVector::from_flat(target_spec.grid, target_spec.m_order, unit);
    const DerivativeStack stack(basis_theta);
    for (int i = 0; i < n_samples; ++i) {
      const double s = (source.times[i] - s0) / s_span;
      const double t = target_spec.grid.t0() + s * target_spec.grid.horizon();
      design(i, b) = stack.level(0).value(t)(0);
    }
  }
  const auto qr = design.colPivHouseholderQr();
  Eigen::VectorXd x(dim * stride);
  for (int d = 0; d < dim; ++d)
    x.segment(static_cast<Eigen::Index>(d) * stride, stride) =
        qr.solve(source.positions.row(d).transpose());
  return x;
}

}  // namespace geobern
