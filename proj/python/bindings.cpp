#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctrap/experiments.hpp"
#include "ctrap/nearcore.hpp"

namespace py = pybind11;
using namespace ctrap;

namespace pybind11::detail {

// Vec3 <-> any length-3 sequence; returned as a tuple.
template <>
struct type_caster<Vec3> {
  PYBIND11_TYPE_CASTER(Vec3, _("tuple[float, float, float]"));

  bool load(handle src, bool) {
    if (!src || !py::isinstance<py::sequence>(src) || py::isinstance<py::str>(src)) return false;
    const auto seq = py::reinterpret_borrow<py::sequence>(src);
    if (seq.size() != 3) return false;
    value = Vec3{seq[0].cast<double>(), seq[1].cast<double>(), seq[2].cast<double>()};
    return true;
  }

  static handle cast(const Vec3& v, return_value_policy, handle) { return py::make_tuple(v.x, v.y, v.z).release(); }
};

}  // namespace pybind11::detail

PYBIND11_MODULE(_ctrap, m) {
  m.doc() = "Corrected trapezoidal layer potentials for Stokes flow past ellipsoids";

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::enum_<Chart>(m, "Chart").value("GRID1", Chart::Grid1).value("GRID2", Chart::Grid2);
  py::enum_<Kernel>(m, "Kernel").value("SLP", Kernel::SLP).value("DLP", Kernel::DLP);
  py::enum_<TraceStatus>(m, "TraceStatus")
      .value("CROSSED", TraceStatus::Crossed)
      .value("TIMED_OUT", TraceStatus::TimedOut)
      .value("ENTERED_BODY", TraceStatus::EnteredBody);

  py::class_<StandardEllipsoid>(m, "StandardEllipsoid")
      .def(py::init([](double a, double b, double c) { return StandardEllipsoid{a, b, c}; }), py::arg("a"),
           py::arg("b"), py::arg("c"))
      .def_readwrite("a", &StandardEllipsoid::a)
      .def_readwrite("b", &StandardEllipsoid::b)
      .def_readwrite("c", &StandardEllipsoid::c)
      .def("level", &StandardEllipsoid::level);

  py::class_<Pose>(m, "Pose")
      .def(py::init([](double phi, double theta, double psi, Vec3 s) { return Pose{phi, theta, psi, s}; }),
           py::arg("phi") = 0.0, py::arg("theta") = 0.0, py::arg("psi") = 0.0, py::arg("s") = Vec3{})
      .def_readwrite("phi", &Pose::phi)
      .def_readwrite("theta", &Pose::theta)
      .def_readwrite("psi", &Pose::psi)
      .def_readwrite("s", &Pose::s)
      .def("rotation", [](const Pose& p) {
        const Mat3 r = p.rotation();
        return std::vector<std::vector<double>>{
            {r(0, 0), r(0, 1), r(0, 2)}, {r(1, 0), r(1, 1), r(1, 2)}, {r(2, 0), r(2, 1), r(2, 2)}};
      });

  py::class_<Body>(m, "Body")
      .def(py::init<const StandardEllipsoid&, const Pose&, int, int, int, int>(), py::arg("ellipsoid"),
           py::arg("pose"), py::arg("n1"), py::arg("m1"), py::arg("n2"), py::arg("m2"))
      .def_readonly("ellipsoid", &Body::ell)
      .def_readonly("pose", &Body::pose)
      .def("set_uniform_density", &Body::set_uniform_density, py::arg("f"))
      .def("density", [](const Body& b, Chart c) { auto s = b.density(c); return std::vector<Vec3>(s.begin(), s.end()); })
      .def("node_count", [](const Body& b, Chart c) { return b.grid(c).node_count(); });

  py::class_<EvalOptions>(m, "EvalOptions")
      .def(py::init([](bool correction, std::optional<Chart> chart, bool force_puncture) {
             return EvalOptions{correction, chart, force_puncture};
           }),
           py::arg("correction") = true, py::arg("chart") = std::nullopt, py::arg("force_puncture") = false)
      .def_readwrite("correction", &EvalOptions::correction)
      .def_readwrite("chart", &EvalOptions::chart)
      .def_readwrite("force_puncture", &EvalOptions::force_puncture);

  py::class_<EvalFlags>(m, "EvalFlags")
      .def_readonly("correct", &EvalFlags::correct)
      .def_readonly("roundoff", &EvalFlags::roundoff)
      .def_readonly("chart", &EvalFlags::chart)
      .def_readonly("d", &EvalFlags::d)
      .def_readonly("d_up", &EvalFlags::d_up);

  py::class_<LayerResult>(m, "LayerResult")
      .def_readonly("value", &LayerResult::value)
      .def_readonly("flags", &LayerResult::flags);

  m.def("eval_layer", &eval_layer, py::arg("body"), py::arg("kernel"), py::arg("x"),
        py::arg("options") = EvalOptions{}, "Layer potential of one body at a world point");

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterations", &SolveReport::iterations)
      .def_readonly("residual", &SolveReport::residual)
      .def_readonly("history", &SolveReport::history);

  py::class_<ShadowSpec>(m, "ShadowSpec")
      .def(py::init<>())
      .def_readwrite("normal", &ShadowSpec::normal)
      .def_readwrite("start", &ShadowSpec::start)
      .def_readwrite("stop", &ShadowSpec::stop)
      .def_readwrite("e1", &ShadowSpec::e1)
      .def_readwrite("e2", &ShadowSpec::e2)
      .def_readwrite("y_lo", &ShadowSpec::y_lo)
      .def_readwrite("y_hi", &ShadowSpec::y_hi)
      .def_readwrite("z_lo", &ShadowSpec::z_lo)
      .def_readwrite("z_hi", &ShadowSpec::z_hi)
      .def_readwrite("count", &ShadowSpec::count)
      .def_readwrite("reversible", &ShadowSpec::reversible);

  py::class_<Scene>(m, "Scene")
      .def_readonly("bodies", &Scene::bodies)
      .def_readwrite("u_inf", &Scene::u_inf)
      .def_readonly("shadow", &Scene::shadow)
      .def(
          "solve",
          [](Scene& s, double tol, bool correction) {
            SolveOptions o;
            o.tol = tol;
            o.eval.correction = correction;
            py::gil_scoped_release release;
            return solve_densities(s.bodies, s.u_inf, o);
          },
          py::arg("tol") = 1e-10, py::arg("correction") = true)
      .def(
          "velocity", [](const Scene& s, const Vec3& x, const EvalOptions& o) { return velocity(s, x, o); },
          py::arg("x"), py::arg("options") = EvalOptions{})
      .def("inside", [](const Scene& s, const Vec3& x) { return inside_any(s, x); })
      .def("write_checkpoint", [](const Scene& s, const std::string& path) { write_checkpoint(path, s.bodies); })
      .def("load_checkpoint", [](Scene& s, const std::string& path) {
        prepare_densities(s, path, SolveOptions{});
      });

  m.def("parse_scene", &parse_scene, py::arg("text"), py::arg("resolution") = std::nullopt);
  m.def("load_scene", &load_scene, py::arg("path"), py::arg("resolution") = std::nullopt);

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("y0", &TraceRecord::y0)
      .def_readonly("z0", &TraceRecord::z0)
      .def_readonly("t_fin", &TraceRecord::t_fin)
      .def_readonly("y_fin1", &TraceRecord::y_fin1)
      .def_readonly("y_fin2", &TraceRecord::y_fin2)
      .def_readonly("status", &TraceRecord::status)
      .def_readonly("error", &TraceRecord::error);

  m.def(
      "rk4_trace",
      [](const VelocityField& u, const Vec3& x0, double dt, std::optional<std::pair<Vec3, double>> stop, double t_max) {
        std::optional<Plane> plane;
        if (stop) plane = Plane{normalized(stop->first), stop->second};
        const TraceResult r = rk4_trace(u, x0, dt, plane, t_max);
        return py::make_tuple(r.x, r.t, r.status);
      },
      py::arg("velocity"), py::arg("x0"), py::arg("dt"), py::arg("stop") = std::nullopt, py::arg("t_max") = 1e4,
      "RK4 with a Python velocity callable; stop is (normal, offset). Returns (x, t, status).");

  m.def(
      "shadow_experiment",
      [](const Scene& s, const ShadowSpec& spec, double dt, bool correction, double t_max) {
        const EvalOptions o{correction, {}};
        py::gil_scoped_release release;
        return shadow_experiment([&](const Vec3& x) { return velocity(s, x, o); },
                                 [&](const Vec3& x) { return inside_any(s, x); }, spec, dt, t_max);
      },
      py::arg("scene"), py::arg("spec"), py::arg("dt") = 0.02, py::arg("correction") = true, py::arg("t_max") = 1e4);

  m.def(
      "window_integral",
      [](double C, double a, double b, double c, double d, int p, int q, int k) {
        if (p < 0 || q < 0 || k < 0 || p > kMaxPower || q > kMaxPower || k > kMaxK)
          throw py::value_error("need 0 <= p, q <= 12 and 0 <= k <= 5");
        ReducedWindow red;
        red.C = C;
        red.a = a;
        red.b = b;
        red.c = c;
        red.d = d;
        return window_tables(red)(p, q, k);
      },
      py::arg("C"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("p"), py::arg("q"), py::arg("k"),
      "int int u^p v^q / (1 + u^2 + 2Cuv + v^2)^(k+1/2) over [a,b] x [c,d]");
}
