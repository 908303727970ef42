#include "isodiam/catalog.hpp"
#include "isodiam/experiment.hpp"
#include "isodiam/meb.hpp"
#include "isodiam/region.hpp"
#include "isodiam/shapeopt.hpp"
#include "isodiam/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace isodiam;
using nlohmann::json;

// JSON crosses the boundary as text; the Python package decodes it.
namespace {

// pybind11 holders cannot point to const, so backends travel as mutable pointers.
using Holder = std::shared_ptr<ManifoldBackend>;

Holder hold(const BackendPtr& b) { return std::const_pointer_cast<ManifoldBackend>(b); }

Holder backend_from(const std::string& descriptor, const std::string& base_dir) {
  return hold(make_backend(json::parse(descriptor), base_dir));
}

std::string measures(const Region& r) {
  const auto ball = rad(r).ball;
  const double V = r.volume(), P = r.perimeter();
  return json{{"V", V}, {"P", P}, {"rad", ball.radius}, {"ratio", ball.radius * P / (2.0 * V)},
              {"center", {ball.center2().x(), ball.center2().y()}}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_isodiam, m) {
  m.doc() = "rad P at fixed volume on model surfaces";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object code = py::str(std::string(to_string(e.code())));
      PyErr_SetObject(error.ptr(), py::make_tuple(code, e.what()).ptr());
    }
  });

  py::class_<ManifoldBackend, Holder>(m, "Backend")
      .def_property_readonly("name", &ManifoldBackend::name)
      .def_property_readonly("flat", &ManifoldBackend::is_flat)
      .def("descriptor", [](const ManifoldBackend& b) { return b.descriptor().dump(); })
      .def("gaussian_curvature", &ManifoldBackend::gaussian_curvature)
      .def("distance", &ManifoldBackend::distance);
  m.def("make_backend", &backend_from, py::arg("descriptor"), py::arg("base_dir") = ".");

  py::class_<Region>(m, "Region")
      .def(py::init([](const Holder& b, std::vector<Point> v) { return Region(b, std::move(v)); }), py::arg("backend"),
           py::arg("vertices"))
      .def_property_readonly("vertices", &Region::vertices)
      .def_property_readonly("backend", [](const Region& r) { return hold(r.backend_ptr()); })
      .def("volume", &Region::volume)
      .def("perimeter", &Region::perimeter)
      .def("volume_gradient", &Region::volume_gradient)
      .def("perimeter_gradient", &Region::perimeter_gradient)
      .def("curvature", &Region::curvature)
      .def("is_simple", &Region::is_simple)
      .def("__len__", &Region::size);
  m.def("measures", &measures, py::arg("region"));
  m.def("chart_ellipse", [](const Holder& b, const Point& c, double a, double bb, int n, double angle) {
          return chart_ellipse(b, c, a, bb, n, angle);
        },
        py::arg("backend"), py::arg("center"), py::arg("a"), py::arg("b"),
        py::arg("n"), py::arg("angle") = 0.0);
  m.def("metric_circle", [](const Holder& b, const Point& c, double r, int n) { return metric_circle(b, c, r, n); },
        py::arg("backend"), py::arg("center"), py::arg("r"), py::arg("n"));
  m.def("regular_polygon", [](const Holder& b, const Point& c, double r, int n) { return regular_polygon(b, c, r, n); },
        py::arg("backend"), py::arg("center"), py::arg("radius"),
        py::arg("n"));
  m.def("random_star_region",
        [](const Holder& b, const Point& c, int n, double lo, double hi, std::uint64_t seed) {
          return random_star_region(b, c, n, lo, hi, seed);
        },
        py::arg("backend"), py::arg("center"), py::arg("n"),
        py::arg("r_min"), py::arg("r_max"), py::arg("seed") = 0);

  m.def(
      "welzl",
      [](const std::vector<Point>& pts, std::uint64_t seed) {
        const auto b = welzl(pts, seed);
        return py::make_tuple(Point(b.center2()), b.radius);
      },
      py::arg("points"), py::arg("seed") = 0);

  m.def("check_euclidean", [](const Region& r, double tol) { return check_euclidean(r, tol).to_json().dump(); },
        py::arg("region"), py::arg("tol") = 1e-6);
  m.def("check_ch", [](const Region& r, double tol) { return check_ch(r, tol).to_json().dump(); },
        py::arg("region"), py::arg("tol") = 1e-6);
  m.def(
      "check_ch_ball",
      [](const Holder& b, const Point& c, double r, double tol) { return check_ch_ball(b, c, r, tol).to_json().dump(); },
      py::arg("backend"), py::arg("center"), py::arg("r"), py::arg("tol") = 1e-6);
  m.def(
      "check_ricci_ball",
      [](const Holder& b, const Point& c, double r, double tol) {
        return check_ricci_ball(b, c, r, tol).to_json().dump();
      },
      py::arg("backend"), py::arg("center"), py::arg("r"), py::arg("tol") = 1e-9);

  m.def(
      "minimize",
      [](double V, const Region& init, int max_iterations) {
        ShapeParams p;
        p.max_iterations = max_iterations;
        const MinimizeResult res = minimize(V, init, p);
        json trace = json::array();
        for (const auto& row : res.trace) trace.push_back(row.ratio);
        const json out{{"ratio", res.state.ratio()},
                       {"iterations", res.trace.empty() ? 0 : res.trace.back().iteration},
                       {"termination", std::string(to_string(res.termination))},
                       {"monotone", res.monotone},
                       {"trace", trace}};
        return py::make_tuple(out.dump(), res.state.region);
      },
      py::arg("V"), py::arg("init"), py::arg("max_iterations") = 2000);

  m.def("critical_catenoid_T0", &critical_catenoid_T0);
  m.def("minimal_ratio", &minimal_ratio, py::arg("T"));
  m.def(
      "ratio_sweep",
      [](double lo, double hi, int samples) {
        std::vector<std::pair<double, double>> out;
        for (const auto& r : ratio_sweep(lo, hi, samples, 0, 0)) out.emplace_back(r.T, r.rho);
        return out;
      },
      py::arg("T_min"), py::arg("T_max"), py::arg("samples"));

  m.def(
      "run_config",
      [](const std::filesystem::path& path, const std::filesystem::path& out, std::optional<std::uint64_t> seed,
         double tol_scale) {
        RunOptions opts;
        opts.out = out;
        opts.seed = seed;
        opts.tol_scale = tol_scale;
        py::gil_scoped_release release;
        return run_experiment(ExperimentConfig::load(path), opts).to_json().dump();
      },
      py::arg("path"), py::arg("out") = "results", py::arg("seed") = py::none(), py::arg("tol_scale") = 1.0);
}
