#include "geobern/solver.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace geobern {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& fn,
                            const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd base = fn(x);
  Eigen::MatrixXd jac(base.size(), x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const Eigen::VectorXd up = fn(probe);
    probe(i) = x(i) - h;
    const Eigen::VectorXd down = fn(probe);
    probe(i) = x(i);
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

// Equality rows with a nonzero band become two inequality rows; the solver
// then only ever sees exact equalities plus <= 0 inequalities.
class WorkingProblem {
 public:
  WorkingProblem(const NLPInstance& nlp, DerivativeMode mode) : nlp_(&nlp), mode_(mode) {
    for (int i = 0; i < nlp.n_eq; ++i) {
      if (nlp.eq_band.size() > i && nlp.eq_band(i) > 0.0)
        banded_.push_back(i);
      else
        exact_.push_back(i);
    }
    m_eq_ = static_cast<int>(exact_.size());
    m_ineq_ = nlp.n_ineq + 2 * static_cast<int>(banded_.size());
  }

  int n() const { return nlp_->n_vars; }
  int m_eq() const { return m_eq_; }
  int m_ineq() const { return m_ineq_; }

  double objective(const Eigen::VectorXd& x) const { return nlp_->objective(x); }

  Eigen::MatrixXd objective_hessian_or_identity(const Eigen::VectorXd& x) const {
    if (nlp_->objective_hessian) return nlp_->objective_hessian(x);
    return Eigen::MatrixXd::Identity(n(), n());
  }

  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const {
    if (mode_ == DerivativeMode::FiniteDifferenceCheck) {
      auto scalar = [this](const Eigen::VectorXd& p) {
        return Eigen::VectorXd::Constant(1, nlp_->objective(p));
      };
      return fd_jacobian(scalar, x, fd_step(x)).row(0).transpose();
    }
    return nlp_->objective_gradient(x);
  }

  Eigen::VectorXd eq(const Eigen::VectorXd& x) const {
    return select_exact(nlp_->n_eq > 0 ? nlp_->eq_constraints(x) : Eigen::VectorXd());
  }

  Eigen::VectorXd ineq(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd raw_eq = nlp_->n_eq > 0 ? nlp_->eq_constraints(x) : Eigen::VectorXd();
    const Eigen::VectorXd raw_ineq =
        nlp_->n_ineq > 0
            ? (nlp_->solver_ineq ? nlp_->solver_ineq(x) : nlp_->ineq_constraints(x))
            : Eigen::VectorXd();
    Eigen::VectorXd out(m_ineq_);
    out.head(nlp_->n_ineq) = raw_ineq;
    for (std::size_t b = 0; b < banded_.size(); ++b) {
      const int row = banded_[b];
      const double band = nlp_->eq_band(row);
      out(nlp_->n_ineq + 2 * static_cast<Eigen::Index>(b)) = raw_eq(row) - band;
      out(nlp_->n_ineq + 2 * static_cast<Eigen::Index>(b) + 1) = -raw_eq(row) - band;
    }
    return out;
  }

  Eigen::MatrixXd eq_jacobian(const Eigen::VectorXd& x) const {
    const Eigen::MatrixXd raw = raw_eq_jacobian(x);
    Eigen::MatrixXd out(m_eq_, n());
    for (std::size_t i = 0; i < exact_.size(); ++i) out.row(i) = raw.row(exact_[i]);
    return out;
  }

  Eigen::MatrixXd ineq_jacobian(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(m_ineq_, n());
    if (nlp_->n_ineq > 0) {
      if (mode_ == DerivativeMode::FiniteDifferenceCheck) {
        out.topRows(nlp_->n_ineq) = fd_jacobian(
            nlp_->solver_ineq ? nlp_->solver_ineq : nlp_->ineq_constraints, x, fd_step(x));
      } else {
        out.topRows(nlp_->n_ineq) =
            nlp_->solver_ineq_jacobian ? nlp_->solver_ineq_jacobian(x) : nlp_->ineq_jacobian(x);
      }
    }
    if (!banded_.empty()) {
      const Eigen::MatrixXd raw = raw_eq_jacobian(x);
      for (std::size_t b = 0; b < banded_.size(); ++b) {
        out.row(nlp_->n_ineq + 2 * static_cast<Eigen::Index>(b)) = raw.row(banded_[b]);
        out.row(nlp_->n_ineq + 2 * static_cast<Eigen::Index>(b) + 1) = -raw.row(banded_[b]);
      }
    }
    return out;
  }

  // Violation of the original instance (band-aware), for reporting.
  static double band_violation(const NLPInstance& nlp, const Eigen::VectorXd& c) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double band = nlp.eq_band.size() > i ? nlp.eq_band(i) : 0.0;
      v = std::max(v, std::abs(c(i)) - band);
    }
    return std::max(v, 0.0);
  }

 private:
  Eigen::VectorXd select_exact(const Eigen::VectorXd& raw) const {
    Eigen::VectorXd out(m_eq_);
    for (std::size_t i = 0; i < exact_.size(); ++i) out(i) = raw(exact_[i]);
    return out;
  }

  Eigen::MatrixXd raw_eq_jacobian(const Eigen::VectorXd& x) const {
    if (nlp_->n_eq == 0) return Eigen::MatrixXd(0, n());
    if (mode_ == DerivativeMode::FiniteDifferenceCheck)
      return fd_jacobian(nlp_->eq_constraints, x, fd_step(x));
    return nlp_->eq_jacobian(x);
  }

  static double fd_step(const Eigen::VectorXd& x) { return 1e-6 * (1.0 + x.norm()); }

  const NLPInstance* nlp_;
  DerivativeMode mode_;
  std::vector<int> exact_;
  std::vector<int> banded_;
  int m_eq_ = 0;
  int m_ineq_ = 0;
};

struct AlEval {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd jeq;      // equality Jacobian
  Eigen::VectorXd eq;       // equality values
  Eigen::MatrixXd jineq;    // inequality Jacobian
  Eigen::VectorXd ineq;     // inequality values
  Eigen::VectorXd shifted;  // mu + penalty * g (activation weights)
};

double al_value(const WorkingProblem& prob, const Eigen::VectorXd& x,
                const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu, double penalty) {
  double val = prob.objective(x);
  if (prob.m_eq() > 0) {
    const Eigen::VectorXd c = prob.eq(x);
    val += lambda.dot(c) + 0.5 * penalty * c.squaredNorm();
  }
  if (prob.m_ineq() > 0) {
    const Eigen::VectorXd g = prob.ineq(x);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const double shifted = mu(j) + penalty * g(j);
      if (shifted > 0.0) val += (shifted * shifted - mu(j) * mu(j)) / (2.0 * penalty);
      else val -= mu(j) * mu(j) / (2.0 * penalty);
    }
  }
  return val;
}

AlEval al_value_grad(const WorkingProblem& prob, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu, double penalty) {
  AlEval out;
  out.value = prob.objective(x);
  out.grad = prob.objective_gradient(x);
  if (prob.m_eq() > 0) {
    out.eq = prob.eq(x);
    out.jeq = prob.eq_jacobian(x);
    out.value += lambda.dot(out.eq) + 0.5 * penalty * out.eq.squaredNorm();
    out.grad += out.jeq.transpose() * (lambda + penalty * out.eq);
  }
  if (prob.m_ineq() > 0) {
    out.ineq = prob.ineq(x);
    out.jineq = prob.ineq_jacobian(x);
    out.shifted = Eigen::VectorXd::Zero(out.ineq.size());
    Eigen::VectorXd active = Eigen::VectorXd::Zero(out.ineq.size());
    for (Eigen::Index j = 0; j < out.ineq.size(); ++j) {
      const double shifted = mu(j) + penalty * out.ineq(j);
      if (shifted > 0.0) {
        out.shifted(j) = shifted;
        active(j) = shifted;
        out.value += (shifted * shifted - mu(j) * mu(j)) / (2.0 * penalty);
      } else {
        out.value -= mu(j) * mu(j) / (2.0 * penalty);
      }
    }
    out.grad += out.jineq.transpose() * active;
  }
  return out;
}

struct InnerResult {
  Eigen::VectorXd x;
  double grad_norm = 0.0;
  int iterations = 0;
};

// Levenberg-Marquardt iteration on the augmented Lagrangian. The quadratic
// model uses the exact objective Hessian when the instance provides one plus
// penalty * J^T J over equalities and active or near-active inequalities; the
// trust-region ratio test keeps steps honest where the model misses
// constraint curvature (the Gaussian bumps turn the active-set boundary into
// a cliff).
InnerResult minimize_al(const WorkingProblem& prob, Eigen::VectorXd x,
                        const Eigen::VectorXd& lambda, const Eigen::VectorXd& mu, double penalty,
                        double grad_tol, int max_iters) {
  AlEval cur = al_value_grad(prob, x, lambda, mu, penalty);
  InnerResult result{x, cur.grad.norm(), 0};
  double damping = 1e-6;
  int stalled_iters = 0;
  const bool trace = std::getenv("GEOBERN_INNER_TRACE") != nullptr;

  for (int iter = 0; iter < max_iters; ++iter) {
    if (result.grad_norm <= grad_tol) break;
    if (stalled_iters >= 15) break;  // descent below rounding noise; let the
                                     // outer loop update multipliers instead
    ++result.iterations;
    if (trace && iter % 25 == 0)
      std::fprintf(stderr, "  [inner] it=%d phi=%.9e |g|=%.3e damp=%.1e\n", iter, cur.value,
                   result.grad_norm, damping);

    Eigen::MatrixXd model = prob.objective_hessian_or_identity(x);
    if (cur.jeq.size() > 0) model += penalty * (cur.jeq.transpose() * cur.jeq);
    if (cur.jineq.size() > 0) {
      // Near-active rows join the model too: a step sized by a model that
      // ignores a boundary lying just ahead bounces off it (value spike, LM
      // rejection, repeat). The extra curvature is one-sided and harmless.
      for (Eigen::Index j = 0; j < cur.shifted.size(); ++j)
        if (cur.shifted(j) > 0.0 || cur.ineq(j) > -0.01)
          model += penalty * (cur.jineq.row(j).transpose() * cur.jineq.row(j));
    }
    const double scale = std::max(1.0, model.diagonal().cwiseAbs().maxCoeff());

    // Marquardt damping: proportional to each diagonal entry so the flat
    // directions of the model (curvatures span ten orders of magnitude once
    // the penalty weighs in) stay mobile.
    Eigen::MatrixXd damped = model;
    damped.diagonal() += damping * (model.diagonal().cwiseMax(1e-12 * scale).cwiseAbs());
    const Eigen::LLT<Eigen::MatrixXd> llt(damped);
    if (llt.info() != Eigen::Success) {
      damping = std::min(damping * 10.0, 1e12);
      continue;
    }
    const Eigen::VectorXd dir = llt.solve(-cur.grad);
    if (!dir.allFinite()) {
      damping = std::min(damping * 10.0, 1e12);
      continue;
    }

    const double model_decrease = -(cur.grad.dot(dir) + 0.5 * dir.dot(model * dir));
    const Eigen::VectorXd x_trial = x + dir;
    const double value_trial = al_value(prob, x_trial, lambda, mu, penalty);
    const double actual_decrease = cur.value - value_trial;
    const double ratio = actual_decrease / std::max(model_decrease, 1e-300);

    static const bool step_trace = std::getenv("GEOBERN_STEP_TRACE") != nullptr;
    if (step_trace)
      std::fprintf(stderr,
                   "    [step] it=%d |g|=%.2e |d|=%.2e damp=%.1e model_dec=%.3e actual=%.3e "
                   "ratio=%.3f\n",
                   iter, result.grad_norm, dir.norm(), damping, model_decrease, actual_decrease,
                   ratio);

    if (std::isfinite(value_trial) && actual_decrease > 0.0 && ratio > 0.1) {
      if (actual_decrease > 1e-14 * (1.0 + std::abs(cur.value)))
        stalled_iters = 0;
      else
        ++stalled_iters;
      x = x_trial;
      if (ratio > 0.75)
        damping = std::max(damping / 3.0, 1e-12);
      else if (ratio < 0.25)
        damping = std::min(damping * 2.0, 1e12);
    } else {
      // The model overshot (typically into a Gaussian cliff). Backtrack along
      // the same descent direction instead of discarding the iteration.
      damping = std::min(damping * 10.0, 1e12);
      const double slope = cur.grad.dot(dir);
      double step = 0.5;
      bool accepted = false;
      double decrease = 0.0;
      for (int bt = 0; bt < 40; ++bt) {
        const Eigen::VectorXd x_bt = x + step * dir;
        const double value_bt = al_value(prob, x_bt, lambda, mu, penalty);
        if (std::isfinite(value_bt) && value_bt <= cur.value + 1e-4 * step * slope) {
          x = x_bt;
          decrease = cur.value - value_bt;
          accepted = true;
          break;
        }
        step *= 0.5;
        if (step * dir.norm() < 1e-18 * (1.0 + x.norm())) break;
      }
      if (!accepted) {
        if (damping >= 1e12) break;  // no progress at maximum damping
        ++stalled_iters;
        continue;
      }
      if (decrease > 1e-14 * (1.0 + std::abs(cur.value)))
        stalled_iters = 0;
      else
        ++stalled_iters;
    }
    cur = al_value_grad(prob, x, lambda, mu, penalty);
    result.x = x;
    result.grad_norm = cur.grad.norm();
  }
  result.x = x;
  return result;
}

}  // namespace

SolveReport solve(const NLPInstance& nlp, const Eigen::VectorXd& x0, const SolverOptions& opts) {
  if (x0.size() != nlp.n_vars) throw std::invalid_argument("solve: x0 length mismatch");
  const auto t_start = std::chrono::steady_clock::now();

  const WorkingProblem prob(nlp, opts.derivative_mode);
  Eigen::VectorXd x = x0;

  {
    const double f0 = prob.objective(x);
    const bool eq_ok = prob.m_eq() == 0 || prob.eq(x).allFinite();
    const bool ineq_ok = prob.m_ineq() == 0 || prob.ineq(x).allFinite();
    if (!std::isfinite(f0) || !eq_ok || !ineq_ok)
      throw std::invalid_argument("solve: objective or constraints not finite at x0");
  }

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(prob.m_eq());
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(prob.m_ineq());
  double penalty = opts.penalty_init;

  // Least-squares multiplier estimate at the start point; when the guess is
  // already a constrained minimizer this makes the first inner loop a no-op.
  if (prob.m_eq() > 0) {
    const Eigen::MatrixXd jac_t = prob.eq_jacobian(x).transpose();
    lambda = jac_t.colPivHouseholderQr().solve(-prob.objective_gradient(x));
  }

  // Feasibility is always measured on the instance's own rows; the solver's
  // conditioned view of the inequalities rescales values and would loosen the
  // tolerance by the transform's slope.
  auto violation_of = [&](const Eigen::VectorXd& point) {
    double v = 0.0;
    if (nlp.n_eq > 0) v = WorkingProblem::band_violation(nlp, nlp.eq_constraints(point));
    if (nlp.n_ineq > 0) v = std::max(v, nlp.ineq_constraints(point).maxCoeff());
    return std::max(v, 0.0);
  };

  SolveReport report;
  report.x_opt = x;
  double best_violation = violation_of(x);
  double best_objective = prob.objective(x);
  report.objective = best_objective;

  double v_prev = best_violation;
  std::vector<double> violation_history{best_violation};
  double last_grad_norm = std::numeric_limits<double>::infinity();

  const bool trace = std::getenv("GEOBERN_SOLVER_TRACE") != nullptr;

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    report.outer_iters = outer;
    const double inner_tol = std::max(opts.tol_opt, std::min(1e-2, 0.1 * v_prev));
    InnerResult inner = minimize_al(prob, x, lambda, mu, penalty, inner_tol, opts.max_inner);
    x = inner.x;
    report.inner_iters += inner.iterations;
    last_grad_norm = inner.grad_norm;
    if (trace) {
      const Eigen::VectorXd gf = prob.objective_gradient(x);
      Eigen::VectorXd geq = Eigen::VectorXd::Zero(x.size());
      if (prob.m_eq() > 0)
        geq = prob.eq_jacobian(x).transpose() * (lambda + penalty * prob.eq(x));
      Eigen::VectorXd gineq = Eigen::VectorXd::Zero(x.size());
      if (prob.m_ineq() > 0) {
        const Eigen::VectorXd g = prob.ineq(x);
        Eigen::VectorXd act = Eigen::VectorXd::Zero(g.size());
        for (Eigen::Index j = 0; j < g.size(); ++j)
          act(j) = std::max(0.0, mu(j) + penalty * g(j));
        gineq = prob.ineq_jacobian(x).transpose() * act;
      }
      std::fprintf(stderr,
                   "[solver] outer=%d inner=%d |g|=%.3e (F %.1e eq %.1e ineq %.1e) viol=%.3e "
                   "obj=%.6e pen=%.1e |lam|=%.2e |mu|=%.2e\n",
                   outer, inner.iterations, inner.grad_norm, gf.norm(), geq.norm(), gineq.norm(),
                   violation_of(x), prob.objective(x), penalty,
                   lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0,
                   mu.size() ? mu.cwiseAbs().maxCoeff() : 0.0);
    }

    const Eigen::VectorXd c = prob.m_eq() > 0 ? prob.eq(x) : Eigen::VectorXd();
    const Eigen::VectorXd g = prob.m_ineq() > 0 ? prob.ineq(x) : Eigen::VectorXd();
    const double v = violation_of(x);
    const double f = prob.objective(x);
    violation_history.push_back(v);

    if (v < best_violation - 1e-12 || (std::abs(v - best_violation) <= 1e-12 && f < best_objective)) {
      best_violation = v;
      best_objective = f;
      report.x_opt = x;
    }

    // Multipliers that make the inner gradient the Lagrangian gradient.
    Eigen::VectorXd lambda_next = lambda + penalty * c;
    Eigen::VectorXd mu_next = mu;
    for (Eigen::Index j = 0; j < mu.size(); ++j)
      mu_next(j) = std::max(0.0, mu(j) + penalty * g(j));

    if (v <= opts.tol_feas) {
      // KKT certificate with least-squares multipliers over the active set.
      // The running AL multipliers carry rounding dust that the Jacobian
      // scale amplifies above tol_opt even at a true optimum. Near-active
      // plain inequality rows join the basis too: at constraint corners the
      // AL multiplier history may never have touched a row that supports the
      // point. Banded-equality pairs enter only through their multipliers --
      // both members sit a band-width from zero and would otherwise flood
      // the basis with +/- copies of the same row.
      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < mu_next.size(); ++j)
        if (mu_next(j) > 0.0 || (j < nlp.n_ineq && g(j) >= -10.0 * opts.tol_feas))
          active.push_back(j);
      const Eigen::VectorXd grad_f = prob.objective_gradient(x);
      const Eigen::MatrixXd jeq = prob.m_eq() > 0 ? prob.eq_jacobian(x)
                                                  : Eigen::MatrixXd(0, nlp.n_vars);
      const Eigen::MatrixXd jineq =
          active.empty() ? Eigen::MatrixXd(0, nlp.n_vars) : prob.ineq_jacobian(x);

      Eigen::MatrixXd basis(nlp.n_vars, prob.m_eq() + static_cast<int>(active.size()));
      basis.leftCols(prob.m_eq()) = jeq.transpose();
      for (std::size_t j = 0; j < active.size(); ++j)
        basis.col(prob.m_eq() + static_cast<Eigen::Index>(j)) = jineq.row(active[j]).transpose();

      Eigen::VectorXd refined =
          basis.cols() > 0 ? basis.colPivHouseholderQr().solve(-grad_f).eval()
                           : Eigen::VectorXd();
      // Clip negative inequality multipliers; the certificate just fails if
      // the clipped estimate is not stationary.
      for (std::size_t j = 0; j < active.size(); ++j)
        refined(prob.m_eq() + static_cast<Eigen::Index>(j)) =
            std::max(0.0, refined(prob.m_eq() + static_cast<Eigen::Index>(j)));
      const double stationarity =
          basis.cols() > 0 ? (grad_f + basis * refined).norm() : grad_f.norm();

      if (trace)
        std::fprintf(stderr, "  [kkt] refined stationarity=%.3e active=%zu inner_g=%.3e\n",
                     stationarity, active.size(), inner.grad_norm);
      // The inner gradient with the trial multipliers is itself the
      // Lagrangian gradient, so either certificate suffices.
      if (stationarity <= opts.tol_opt || inner.grad_norm <= opts.tol_opt) {
        report.status = SolveStatus::Optimal;
        report.x_opt = x;
        report.kkt_stationarity = std::min(stationarity, inner.grad_norm);
        double comp = 0.0;
        for (std::size_t j = 0; j < active.size(); ++j)
          comp = std::max(comp, std::abs(refined(prob.m_eq() + static_cast<Eigen::Index>(j)) *
                                         g(active[j])));
        report.kkt_complementarity = comp;
        best_violation = v;
        best_objective = f;
        break;
      }
    }

    // Update multipliers whenever the violation is not growing. Grow the
    // penalty only while the violation is both substantial and stalling:
    // near-feasible iterates converge through multiplier updates alone, and
    // premature growth turns the active boundaries into walls the inner
    // iteration cannot slide along.
    if (v <= std::max(opts.tol_feas, 1.0 * v_prev)) {
      lambda = lambda_next;
      mu = mu_next;
    }
    if (v > std::max(50.0 * opts.tol_feas, 0.25 * v_prev)) {
      penalty = std::min(penalty * opts.penalty_growth, opts.penalty_max);
    }

    if (penalty >= opts.penalty_max && v > opts.tol_feas && violation_history.size() >= 6) {
      const double old = violation_history[violation_history.size() - 6];
      if (old - v < 0.01 * std::max(old, 1e-300)) {
        report.status = SolveStatus::Infeasible;
        break;
      }
    }
    v_prev = v;
  }

  if (report.status != SolveStatus::Optimal) {
    report.kkt_stationarity = last_grad_norm;
    report.kkt_complementarity = 0.0;
  }

  report.violation_history = violation_history;

  // Final report fields at the chosen iterate.
  const Eigen::VectorXd x_best = report.x_opt;
  report.objective = nlp.objective(x_best);
  report.max_eq_violation =
      nlp.n_eq > 0 ? WorkingProblem::band_violation(nlp, nlp.eq_constraints(x_best)) : 0.0;
  report.max_ineq_violation =
      nlp.n_ineq > 0 ? std::max(0.0, nlp.ineq_constraints(x_best).maxCoeff()) : 0.0;
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return report;
}

double check_gradients(const NLPInstance& nlp, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw std::domain_error("check_gradients: step must be > 0");
  auto rel_error = [](const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& numeric) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < analytic.rows(); ++i)
      for (Eigen::Index j = 0; j < analytic.cols(); ++j) {
        const double a = analytic(i, j);
        const double b = numeric(i, j);
        worst = std::max(worst, std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}));
      }
    return worst;
  };

  double worst = 0.0;
  auto scalar = [&nlp](const Eigen::VectorXd& p) {
    return Eigen::VectorXd::Constant(1, nlp.objective(p));
  };
  worst = std::max(worst, rel_error(nlp.objective_gradient(x).transpose(),
                                    fd_jacobian(scalar, x, h)));
  if (nlp.n_eq > 0)
    worst = std::max(worst, rel_error(nlp.eq_jacobian(x), fd_jacobian(nlp.eq_constraints, x, h)));
  if (nlp.n_ineq > 0)
    worst = std::max(worst,
                     rel_error(nlp.ineq_jacobian(x), fd_jacobian(nlp.ineq_constraints, x, h)));
  return worst;
}

}  // namespace geobern
