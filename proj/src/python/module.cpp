#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ghflow/gh.hpp"
#include "ghflow/monitors.hpp"
#include "ghflow/nil_flow.hpp"
#include "ghflow/pseudogroup.hpp"
#include "ghflow/scenarios.hpp"
#include "ghflow/warped_flow.hpp"

namespace py = pybind11;
using namespace ghflow;

namespace {

FiniteMetricSpace space_from_rows(const std::vector<std::vector<double>>& rows,
                                  int basepoint, double tol_tri) {
  const int n = static_cast<int>(rows.size());
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n) * n);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n)
      throw DomainError("distance matrix must be square");
    dist.insert(dist.end(), row.begin(), row.end());
  }
  return FiniteMetricSpace(n, std::move(dist), basepoint, tol_tri);
}

std::vector<std::vector<double>> space_rows(const FiniteMetricSpace& s) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i) {
    rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(s.size()));
    for (int j = 0; j < s.size(); ++j) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s(i, j);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_ghflow, m) {
  m.doc() = "pointed Gromov-Hausdorff estimation and collapsing Ricci flows";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<UsageError>(m, "UsageError");
  py::register_exception<HypothesisError>(m, "HypothesisError");
  py::register_exception<FlowError>(m, "FlowError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<FiniteMetricSpace, std::shared_ptr<FiniteMetricSpace>>(m, "FiniteMetricSpace")
      .def(py::init(&space_from_rows), py::arg("dist"), py::arg("basepoint") = 0,
           py::arg("tol_tri") = 0.0)
      .def_property_readonly("n", &FiniteMetricSpace::size)
      .def_property_readonly("basepoint", &FiniteMetricSpace::basepoint)
      .def_property_readonly("tol_tri", &FiniteMetricSpace::tol_tri)
      .def("distance", [](const FiniteMetricSpace& s, int i, int j) { return s(i, j); })
      .def("matrix", &space_rows)
      .def("radius", &FiniteMetricSpace::radius)
      .def("diameter", &FiniteMetricSpace::diameter)
      .def("validate", &FiniteMetricSpace::validate)
      .def("__repr__", [](const FiniteMetricSpace& s) {
        std::ostringstream os;
        os << "FiniteMetricSpace(n=" << s.size() << ", basepoint=" << s.basepoint() << ")";
        return os.str();
      });

  m.def("sample_circle", &sample_circle, py::arg("circumference"), py::arg("n"));
  m.def("metric_ball", &metric_ball, py::arg("space"), py::arg("center"), py::arg("rho"));
  m.def("rebase", &rebase, py::arg("space"), py::arg("new_basepoint"));

  py::class_<RiemannianSample>(m, "RiemannianSample")
      .def_property_readonly("vertex_count", &RiemannianSample::vertex_count)
      .def_property_readonly("max_edge_length", &RiemannianSample::max_edge_length)
      .def_property_readonly("stencil_anisotropy", &RiemannianSample::stencil_anisotropy)
      .def("grid_slack", &RiemannianSample::grid_slack);

  m.def("sample_warped_torus", &sample_warped_torus, py::arg("f"), py::arg("lambda_"),
        py::arg("nr"), py::arg("ns"));
  m.def("geodesic_distances",
        [](const RiemannianSample& s, int basepoint) {
          return geodesic_distances(s, basepoint, 0);
        },
        py::arg("sample"), py::arg("basepoint") = 0);
  m.def("single_source_distances", &single_source_distances, py::arg("sample"),
        py::arg("source"));

  py::class_<PointedMap>(m, "PointedMap")
      .def_readonly("image", &PointedMap::image);

  py::class_<GhEstimate>(m, "GhEstimate")
      .def_readonly("lower", &GhEstimate::lower)
      .def_readonly("upper", &GhEstimate::upper)
      .def_readonly("method", &GhEstimate::method)
      .def_readonly("eps_grid", &GhEstimate::eps_grid)
      .def_readonly("witness_fwd", &GhEstimate::witness_fwd)
      .def_readonly("witness_bwd", &GhEstimate::witness_bwd)
      .def("witnesses_ok", &GhEstimate::witnesses_ok);

  m.def("default_eps_grid", &default_eps_grid);
  m.def(
      "check_eps_approximation",
      [](const FiniteMetricSpace& x, const FiniteMetricSpace& y,
         const std::vector<int>& image, double eps) {
        PointedMap map{make_space(x), make_space(y), image};
        return check_eps_approximation(map, eps);
      },
      py::arg("source"), py::arg("target"), py::arg("image"), py::arg("eps"));
  m.def(
      "gh_brute_force",
      [](const FiniteMetricSpace& x, const FiniteMetricSpace& y,
         const std::vector<double>& grid) {
        return gh_brute_force(make_space(x), make_space(y),
                              grid.empty() ? default_eps_grid() : grid);
      },
      py::arg("x"), py::arg("y"), py::arg("eps_grid") = std::vector<double>{});
  m.def(
      "gh_upper_bound",
      [](const FiniteMetricSpace& x, const FiniteMetricSpace& y, int budget,
         std::uint64_t seed, const std::vector<double>& grid) {
        return gh_upper_bound(make_space(x), make_space(y), budget, seed,
                              grid.empty() ? default_eps_grid() : grid);
      },
      py::arg("x"), py::arg("y"), py::arg("budget") = 2000, py::arg("seed") = 1,
      py::arg("eps_grid") = std::vector<double>{});
  m.def(
      "gh_lower_bound",
      [](const FiniteMetricSpace& x, const FiniteMetricSpace& y,
         const std::vector<double>& grid) {
        return gh_lower_bound(make_space(x), make_space(y),
                              grid.empty() ? default_eps_grid() : grid);
      },
      py::arg("x"), py::arg("y"), py::arg("eps_grid") = std::vector<double>{});

  py::class_<NilMetric>(m, "NilMetric")
      .def(py::init([](double a, double b, double c) { return NilMetric{a, b, c}; }),
           py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("c") = 1.0)
      .def_readwrite("a", &NilMetric::a)
      .def_readwrite("b", &NilMetric::b)
      .def_readwrite("c", &NilMetric::c);

  py::class_<FlowTrace<NilMetric>>(m, "NilTrace")
      .def_readonly("times", &FlowTrace<NilMetric>::times)
      .def_readonly("states", &FlowTrace<NilMetric>::states)
      .def_readonly("k_max", &FlowTrace<NilMetric>::k_max)
      .def("max_curvature", &FlowTrace<NilMetric>::max_curvature);

  py::class_<WarpedSurfaceMetric>(m, "WarpedSurfaceMetric")
      .def_static("from_profile", &WarpedSurfaceMetric::from_profile, py::arg("f"),
                  py::arg("lambda_"))
      .def_readonly("a", &WarpedSurfaceMetric::a)
      .def_readonly("b", &WarpedSurfaceMetric::b);

  py::class_<FlowTrace<WarpedSurfaceMetric>>(m, "WarpedTrace")
      .def_readonly("times", &FlowTrace<WarpedSurfaceMetric>::times)
      .def_readonly("states", &FlowTrace<WarpedSurfaceMetric>::states)
      .def_readonly("k_max", &FlowTrace<WarpedSurfaceMetric>::k_max)
      .def("max_curvature", &FlowTrace<WarpedSurfaceMetric>::max_curvature);

  m.def("nil_ricci_derivative", &nil_ricci_derivative);
  m.def("nil_curvature_bound", &nil_curvature_bound);
  m.def("integrate_nil", &integrate_nil, py::arg("m0"), py::arg("horizon"), py::arg("dt"),
        py::arg("max_records") = 257);
  m.def("nil_sqrt_form", &nil_sqrt_form, py::arg("c1"), py::arg("c2"),
        py::arg("c3"), py::arg("t"));
  m.def("nil_similarity_form", &nil_similarity_form, py::arg("m0"), py::arg("t"));

  m.def("profile_two_plus_cos", &profile_two_plus_cos, py::arg("n"));
  m.def("gauss_curvature", &gauss_curvature);
  m.def("gauss_bonnet_total", &gauss_bonnet_total);
  m.def("integrate_warped_surface", &integrate_warped_surface, py::arg("m0"),
        py::arg("horizon"), py::arg("dt"), py::arg("max_records") = 129);
  m.def("warped_stable_dt", &warped_stable_dt);
  m.def("r_circle_length", &r_circle_length);

  m.def("shrinkage_rate", &BoundParams::r_of_t, py::arg("t"));

  m.def(
      "run_scenario_json",
      [](const std::string& config_json) {
        const auto cfg = ScenarioConfig::from_json(nlohmann::json::parse(config_json));
        return run_scenario(cfg).to_json(false).dump();
      },
      py::arg("config_json"));
  m.def(
      "run_verify_suite",
      [](const std::string& name, std::uint64_t seed) {
        return run_verify_suite(name, seed, 0).to_json(false).dump();
      },
      py::arg("name"), py::arg("seed") = 1);
}
