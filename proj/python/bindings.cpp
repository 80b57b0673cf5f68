#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nodallab/circle.hpp"
#include "nodallab/error.hpp"
#include "nodallab/functionals.hpp"
#include "nodallab/io.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/order.hpp"
#include "nodallab/params.hpp"
#include "nodallab/report.hpp"
#include "nodallab/svg.hpp"
#include "nodallab/verify.hpp"
#include "nodallab/version.hpp"

namespace py = pybind11;
using namespace nodallab;

namespace {

py::array_t<double> array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

// report::Json goes through its text form; python's json module does the rest.
py::object to_python(const report::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

QuadratureOptions quadrature(std::size_t theta_nodes, std::size_t radial_panels, unsigned jobs) {
  QuadratureOptions q;
  q.theta_nodes = theta_nodes;
  q.radial_panels = radial_panels;
  q.jobs = jobs;
  return q;
}

Vec2 point(const std::pair<double, double>& p) { return {p.first, p.second}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Homogeneous two-phase solutions: construction and analysis";
  m.attr("__version__") = kVersionString;

  // The instance carries the error kind as `.kind`.
  static const py::handle error_type = py::exception<Error>(m, "NodallabError", PyExc_RuntimeError).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error_type(e.what());
      exc.attr("kind") = to_string(e.kind());
      py::set_error(error_type, exc);
    }
  });

  py::class_<ProblemParams>(m, "ProblemParams")
      .def(py::init<double, double, double, double>(), py::arg("q"), py::arg("lambda_plus"), py::arg("lambda_minus"),
           py::arg("mu") = 1.0)
      .def_property_readonly("q", &ProblemParams::q)
      .def_property_readonly("lambda_plus", &ProblemParams::lambda_plus)
      .def_property_readonly("lambda_minus", &ProblemParams::lambda_minus)
      .def_property_readonly("mu", &ProblemParams::mu)
      .def("with_mu", &ProblemParams::with_mu)
      .def("swapped", &ProblemParams::swapped)
      .def("nonlinearity", &ProblemParams::nonlinearity)
      .def("potential", &ProblemParams::potential)
      .def("__repr__", [](const ProblemParams& p) {
        return "ProblemParams(q=" + io::format_double(p.q()) + ", lambda_plus=" + io::format_double(p.lambda_plus()) +
               ", lambda_minus=" + io::format_double(p.lambda_minus()) + ", mu=" + io::format_double(p.mu()) + ")";
      });

  m.def("derived_exponents", [](const ProblemParams& p) { return to_python(report::to_json(derived_exponents(p))); });
  m.def("gamma_q", &gamma_q);
  m.def("beta_q", &beta_q);
  m.def("k_bar", &k_bar);
  m.def("beta_k_sequence", &beta_k_sequence, py::arg("params"), py::arg("count"), py::arg("deltas") = py::none());
  m.def("beta_k_gaps", &beta_k_gaps, py::arg("params"), py::arg("count"), py::arg("deltas") = py::none());
  m.def("sigma_k_sequence", &sigma_k_sequence, py::arg("params"), py::arg("count"));

  py::class_<AngularProfile>(m, "AngularProfile")
      .def(py::init<std::vector<double>, std::vector<double>, std::optional<ProblemParams>>(), py::arg("values"),
           py::arg("derivative"), py::arg("params") = py::none())
      .def_property_readonly("values", [](const AngularProfile& a) { return array(a.values()); })
      .def_property_readonly("derivative", [](const AngularProfile& a) { return array(a.derivative()); })
      .def_property_readonly("params", &AngularProfile::params)
      .def("value_at", &AngularProfile::value_at)
      .def("derivative_at", &AngularProfile::derivative_at)
      .def("scale", &AngularProfile::scale)
      .def("__len__", &AngularProfile::size);

  py::class_<PlanarField>(m, "PlanarField")
      .def_static("homogeneous", &PlanarField::homogeneous, py::arg("gamma"), py::arg("profile"), py::arg("params"))
      .def_static("from_name", &fields::from_name, py::arg("name"), py::arg("params"))
      .def_static(
          "grid",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> values, const ProblemParams& p) {
            if (values.ndim() != 2 || values.shape(0) != values.shape(1))
              throw Error(ErrorKind::Argument, "grid values must be a square 2-d array");
            const auto n = static_cast<std::size_t>(values.shape(0));
            return PlanarField::grid(n, std::vector<double>(values.data(), values.data() + n * n), p);
          },
          py::arg("values"), py::arg("params"))
      .def_property_readonly("params", &PlanarField::params)
      .def("describe", &PlanarField::describe)
      .def("eval", [](const PlanarField& f, double x, double y) { return f.eval({x, y}); })
      .def("grad", [](const PlanarField& f, double x, double y) {
        const auto g = f.grad({x, y});
        return std::pair{g.x, g.y};
      });

  m.def("load", [](const std::filesystem::path& p) -> py::object {
    auto v = io::load(p);
    if (auto* f = std::get_if<PlanarField>(&v)) return py::cast(*f);
    return py::cast(std::get<AngularProfile>(v));
  });
  m.def("save", py::overload_cast<const AngularProfile&, const std::filesystem::path&>(&io::save));
  m.def("save", py::overload_cast<const PlanarField&, const std::filesystem::path&>(&io::save));

#define NODALLAB_QUAD_ARGS py::arg("theta_nodes") = 1024, py::arg("radial_panels") = 512, py::arg("jobs") = 1
  m.def(
      "H",
      [](const PlanarField& f, std::pair<double, double> x0, double r, std::size_t tn, std::size_t rp, unsigned j) {
        return eval_H(f, point(x0), r, quadrature(tn, rp, j));
      },
      py::arg("field"), py::arg("x0"), py::arg("r"), NODALLAB_QUAD_ARGS);
  m.def(
      "D",
      [](const PlanarField& f, std::pair<double, double> x0, double r, double t, std::size_t tn, std::size_t rp,
         unsigned j) { return eval_Dt(f, point(x0), r, t, quadrature(tn, rp, j)); },
      py::arg("field"), py::arg("x0"), py::arg("r"), py::arg("t"), NODALLAB_QUAD_ARGS);
  m.def(
      "N",
      [](const PlanarField& f, std::pair<double, double> x0, double r, double t, std::size_t tn, std::size_t rp,
         unsigned j) { return eval_Nt(f, point(x0), r, t, quadrature(tn, rp, j)); },
      py::arg("field"), py::arg("x0"), py::arg("r"), py::arg("t"), NODALLAB_QUAD_ARGS);
  m.def(
      "W",
      [](const PlanarField& f, std::pair<double, double> x0, double r, double gamma, double t, std::size_t tn,
         std::size_t rp, unsigned j) { return eval_W(f, point(x0), r, gamma, t, quadrature(tn, rp, j)); },
      py::arg("field"), py::arg("x0"), py::arg("r"), py::arg("gamma"), py::arg("t") = 2.0, NODALLAB_QUAD_ARGS);
  m.def(
      "Phi",
      [](const PlanarField& f, std::pair<double, double> x0, double r, double gamma, std::size_t tn, std::size_t rp,
         unsigned j) { return eval_Phi(f, point(x0), r, gamma, quadrature(tn, rp, j)); },
      py::arg("field"), py::arg("x0"), py::arg("r"), py::arg("gamma"), NODALLAB_QUAD_ARGS);
  m.def(
      "h1_norm",
      [](const PlanarField& f, std::pair<double, double> x0, double r, std::size_t tn, std::size_t rp, unsigned j) {
        return h1_norm(f, point(x0), r, quadrature(tn, rp, j));
      },
      py::arg("field"), py::arg("x0"), py::arg("r"), NODALLAB_QUAD_ARGS);
  m.def(
      "monotonicity_scan",
      [](const PlanarField& f, std::pair<double, double> x0, double gamma, const std::vector<double>& radii,
         std::size_t tn, std::size_t rp, unsigned j) {
        const auto v = monotonicity_scan(f, point(x0), gamma, radii, quadrature(tn, rp, j));
        py::dict d;
        d["monotone"] = v.monotone;
        d["violation_radius"] = v.violation_radius;
        d["worst_drop"] = v.worst_drop;
        d["values"] = array(v.trace.values);
        return d;
      },
      py::arg("field"), py::arg("x0"), py::arg("gamma"), py::arg("radii"), NODALLAB_QUAD_ARGS);
  m.def(
      "transition_exponent",
      [](const PlanarField& f, std::pair<double, double> x0, const std::vector<double>& gammas,
         const std::vector<double>& radii, std::size_t tn, std::size_t rp, unsigned j) {
        return to_python(report::to_json(transition_exponent(f, point(x0), gammas, radii, quadrature(tn, rp, j))));
      },
      py::arg("field"), py::arg("x0"), py::arg("gammas"), py::arg("radii"), NODALLAB_QUAD_ARGS);
#undef NODALLAB_QUAD_ARGS

  py::class_<MatchingResult>(m, "MatchingResult")
      .def_readonly("params", &MatchingResult::params)
      .def_readonly("k", &MatchingResult::k)
      .def_readonly("T", &MatchingResult::T)
      .def_readonly("t_bar", &MatchingResult::t_bar)
      .def_readonly("profile", &MatchingResult::profile)
      .def_readonly("psi_residual", &MatchingResult::psi_residual)
      .def_readonly("energy_drift", &MatchingResult::energy_drift)
      .def_readonly("ode_residual", &MatchingResult::ode_residual)
      .def_readonly("seam_jump", &MatchingResult::seam_jump)
      .def("field", &MatchingResult::field)
      .def("to_dict", [](const MatchingResult& r) { return to_python(report::to_json(r)); });

  m.def(
      "construct_uk",
      [](const ProblemParams& p, int k, std::size_t arc_nodes, std::size_t profile_samples) {
        ConstructOptions o;
        o.arc_nodes = arc_nodes;
        o.profile_samples = profile_samples;
        py::gil_scoped_release release;
        return construct_uk(p, k, o);
      },
      py::arg("params"), py::arg("k"), py::arg("arc_nodes") = 2048, py::arg("profile_samples") = 8192);
  m.def(
      "psi", [](const ProblemParams& p, int k, double t, std::size_t n) { return psi(p, k, t, n); }, py::arg("params"),
      py::arg("k"), py::arg("t"), py::arg("arc_nodes") = 1024);
  m.def("energy_drift", &energy_drift, py::arg("params"), py::arg("profile"));
  m.def(
      "hamiltonian_cauchy",
      [](const ProblemParams& p, double w0, double w0p, double step, std::size_t steps) {
        const auto t = hamiltonian_cauchy(p, w0, w0p, step, steps);
        py::dict d;
        d["t"] = array(t.times);
        d["w"] = array(t.w);
        d["w_prime"] = array(t.w_prime);
        d["hamiltonian"] = array(t.hamiltonian);
        d["drift"] = t.drift;
        d["crossings"] = t.crossings;
        return d;
      },
      py::arg("params"), py::arg("w0"), py::arg("w0_prime"), py::arg("step"), py::arg("steps"));

  m.def("dyadic_ladder", &dyadic_ladder, py::arg("r_max"), py::arg("count"));
  m.def("admissible_orders", &admissible_orders);
  m.def(
      "estimate_order",
      [](const PlanarField& f, std::pair<double, double> x0, const std::vector<double>& radii, int max_degree) {
        OrderOptions o;
        o.max_degree = max_degree;
        return to_python(report::to_json(estimate_order(f, point(x0), radii, o)));
      },
      py::arg("field"), py::arg("x0"), py::arg("radii"), py::arg("max_degree") = 0);
  m.def(
      "blow_up",
      [](const PlanarField& f, std::pair<double, double> x0, double r) { return blow_up(f, point(x0), r); },
      py::arg("field"), py::arg("x0"), py::arg("r"));

  py::class_<NodalSet>(m, "NodalSet")
      .def_readonly("grid_cells", &NodalSet::grid_cells)
      .def_readonly("radius", &NodalSet::radius)
      .def_property_readonly("segments",
                             [](const NodalSet& n) {
                               py::array_t<double> a({n.segments.size(), std::size_t{4}});
                               auto v = a.mutable_unchecked<2>();
                               for (std::size_t i = 0; i < n.segments.size(); ++i) {
                                 const auto& s = n.segments[i];
                                 v(i, 0) = s.a.x;
                                 v(i, 1) = s.a.y;
                                 v(i, 2) = s.b.x;
                                 v(i, 3) = s.b.y;
                               }
                               return a;
                             })
      .def_property_readonly("singular_points",
                             [](const NodalSet& n) {
                               py::list out;
                               for (const auto& p : n.singular_points) out.append(py::make_tuple(p.position.x, p.position.y));
                               return out;
                             })
      .def("length", &nodal_length, py::arg("radius"))
      .def("svg", &svg::nodal_svg, py::arg("size_px") = 600);

  m.def(
      "extract_nodal_set",
      [](const PlanarField& f, std::size_t cells, double radius, unsigned jobs, bool singular) {
        auto n = extract_nodal_set(f, cells, radius, jobs);
        if (singular) detect_singular(f, n);
        return n;
      },
      py::arg("field"), py::arg("cells") = 512, py::arg("radius") = 1.0, py::arg("jobs") = 1,
      py::arg("singular") = true);
  m.def("profile_zero_structure", [](const AngularProfile& a) { return to_python(report::to_json(profile_zero_structure(a))); });

  m.def("suite_names", &verify::suite_names);
  m.def(
      "verify",
      [](const std::vector<std::string>& suites, unsigned jobs) {
        verify::Config c;
        c.suites = suites;
        c.jobs = jobs;
        verify::Report r;
        {
          py::gil_scoped_release release;
          r = verify::run(c);
        }
        return to_python(verify::to_json(r));
      },
      py::arg("suites") = std::vector<std::string>{}, py::arg("jobs") = 1);
}
