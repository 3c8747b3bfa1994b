#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <Eigen/Dense>

#include "geobern/bench.hpp"
#include "geobern/scenario.hpp"

namespace py = pybind11;
using namespace geobern;

namespace {

Eigen::VectorXd to_vector(const std::vector<double>& values) {
  Eigen::VectorXd out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out(i) = values[i];
  return out;
}

std::vector<double> to_list(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::vector<std::vector<double>> to_lists(const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> out(m.rows());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out[r].resize(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  }
  return out;
}

GaussianField make_field(int dimension, double amplitude, double sharpness,
                         const std::vector<std::pair<std::vector<double>, double>>& obstacles) {
  std::vector<Obstacle> converted;
  converted.reserve(obstacles.size());
  for (const auto& [center, radius] : obstacles) converted.push_back({to_vector(center), radius});
  return GaussianField(dimension, amplitude, sharpness, std::move(converted));
}

struct PlanResult {
  std::string status;
  double objective = 0.0;
  double max_eq_violation = 0.0;
  double max_ineq_violation = 0.0;
  int outer_iters = 0;
  int inner_iters = 0;
  double wall_time = 0.0;
  double rho = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> positions;   // one row per dimension
  std::vector<std::vector<double>> velocities;
  std::vector<std::vector<double>> knot_positions;
};

PlanResult plan(const GaussianField& field, const std::vector<double>& p0,
                const std::vector<double>& pf, const std::string& variant, int k, int m,
                double v_nominal, double delta, int samples_per_segment) {
  OCPSpec spec =
      OCPSpec::make(variant_from_string(variant), to_vector(p0), to_vector(pf), k, m, v_nominal);
  if (delta >= 0.0) spec.delta = delta;
  const NLPInstance nlp = build_nlp(spec, field);
  const Eigen::VectorXd x0 =
      nlp.pack(ThetaVector::straight_line(to_vector(p0), to_vector(pf), spec.grid, m));
  const SolveReport report = solve(nlp, x0);
  const Trajectory trajectory = decode_solution(nlp, report.x_opt, samples_per_segment);

  PlanResult out;
  out.status = to_string(report.status);
  out.objective = report.objective;
  out.max_eq_violation = report.max_eq_violation;
  out.max_ineq_violation = report.max_ineq_violation;
  out.outer_iters = report.outer_iters;
  out.inner_iters = report.inner_iters;
  out.wall_time = report.wall_time;
  out.rho = nlp.rho;
  out.times = trajectory.times;
  out.positions = to_lists(trajectory.positions);
  out.velocities = to_lists(trajectory.velocities);
  out.knot_positions = to_lists(trajectory.knot_positions);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Composite-Bernstein geodesic trajectory planning";

  m.def("basis_eval", &basis_eval, py::arg("j"), py::arg("order"), py::arg("t"), py::arg("t0"),
        py::arg("tf"), "Bernstein basis function b_{j,N}(t) on [t0, tf]");
  m.def("sigma_from_radius", &sigma_from_radius, py::arg("radius"), py::arg("kappa"));

  py::class_<GaussianField>(m, "GaussianField",
                            "Obstacle field of Gaussian bumps over a Monge patch")
      .def(py::init(&make_field), py::arg("dimension"), py::arg("amplitude"),
           py::arg("sharpness"), py::arg("obstacles"),
           "obstacles: list of (center, radius) pairs")
      .def_property_readonly("dimension", &GaussianField::dimension)
      .def_property_readonly("amplitude", &GaussianField::amplitude)
      .def_property_readonly("sharpness", &GaussianField::sharpness)
      .def("value", [](const GaussianField& f, const std::vector<double>& p) {
        return f.value(to_vector(p));
      })
      .def("gradient", [](const GaussianField& f, const std::vector<double>& p) {
        return to_list(f.gradient(to_vector(p)));
      })
      .def("hessian", [](const GaussianField& f, const std::vector<double>& p) {
        return to_lists(f.hessian(to_vector(p)));
      })
      .def("metric", [](const GaussianField& f, const std::vector<double>& p) {
        return f.metric(to_vector(p));
      })
      .def("christoffel", [](const GaussianField& f, const std::vector<double>& p) {
        const ChristoffelTensor tensor = f.christoffel(to_vector(p));
        std::vector<std::vector<std::vector<double>>> out;
        for (const auto& gamma : tensor.gamma) out.push_back(to_lists(gamma));
        return out;
      })
      .def("clearance_threshold", &GaussianField::clearance_threshold)
      .def("obstacles", [](const GaussianField& f) {
        std::vector<std::pair<std::vector<double>, double>> out;
        for (const Obstacle& obs : f.obstacles()) out.push_back({to_list(obs.center), obs.radius});
        return out;
      });

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("status", &PlanResult::status)
      .def_readonly("objective", &PlanResult::objective)
      .def_readonly("max_eq_violation", &PlanResult::max_eq_violation)
      .def_readonly("max_ineq_violation", &PlanResult::max_ineq_violation)
      .def_readonly("outer_iters", &PlanResult::outer_iters)
      .def_readonly("inner_iters", &PlanResult::inner_iters)
      .def_readonly("wall_time", &PlanResult::wall_time)
      .def_readonly("rho", &PlanResult::rho)
      .def_readonly("times", &PlanResult::times)
      .def_readonly("positions", &PlanResult::positions)
      .def_readonly("velocities", &PlanResult::velocities)
      .def_readonly("knot_positions", &PlanResult::knot_positions);

  m.def("plan", &plan, py::arg("field"), py::arg("p0"), py::arg("pf"),
        py::arg("variant") = "geodesic-like", py::arg("k") = 21, py::arg("m") = 3,
        py::arg("v_nominal") = 1.0, py::arg("delta") = -1.0,
        py::arg("samples_per_segment") = 50,
        "Solve one trajectory problem from a straight-line guess");

  m.def("geodesic_residual",
        [](const GaussianField& field, const std::vector<double>& x,
           const std::vector<double>& v, const std::vector<double>& a) {
          return to_list(geodesic_residual(field, to_vector(x), to_vector(v), to_vector(a)));
        },
        py::arg("field"), py::arg("x"), py::arg("v"), py::arg("a"));

  m.def("canned_field_2d", []() { return canned_scenario_2d().field; },
        "The fixed 12-obstacle 2D benchmark field");
  m.def("canned_field_3d", []() { return canned_scenario_3d().field; },
        "The fixed 15-obstacle 3D benchmark field");
}
