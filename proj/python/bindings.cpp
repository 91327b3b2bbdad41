#include "boltzlab/harness.hpp"
#include "boltzlab/parallel.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace boltzlab;

namespace {

py::array_t<double> to_array(const Field &f) {
  std::vector<py::ssize_t> shape(f.grid.N, f.grid.M);
  py::array_t<double> a(shape);
  std::copy(f.values.begin(), f.values.end(), a.mutable_data());
  return a;
}

Field from_array(const GridSpec &g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (static_cast<std::size_t>(a.size()) != g.size()) throw std::invalid_argument("array size does not match the grid");
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatially homogeneous Boltzmann equation on a velocity grid";

  py::class_<GridSpec>(m, "Grid")
      .def_readonly("N", &GridSpec::N)
      .def_readonly("M", &GridSpec::M)
      .def_readonly("R", &GridSpec::R)
      .def_readonly("dv", &GridSpec::dv)
      .def_readonly("nodes", &GridSpec::nodes)
      .def("__repr__", [](const GridSpec &g) {
        return "Grid(N=" + std::to_string(g.N) + ", M=" + std::to_string(g.M) + ", R=" + format_double(g.R) + ")";
      });
  m.def("make_grid", &make_grid, py::arg("N"), py::arg("M"), py::arg("R"));

  py::class_<Field>(m, "Field")
      .def(py::init(&from_array), py::arg("grid"), py::arg("values"))
      .def_readonly("grid", &Field::grid)
      .def_property_readonly("values", &to_array);

  py::class_<CollisionKernel>(m, "Kernel")
      .def_readonly("N", &CollisionKernel::N)
      .def_property_readonly("gamma", &CollisionKernel::gamma)
      .def("describe", &CollisionKernel::describe);
  m.def("hard_sphere", &hard_sphere, py::arg("N"));
  m.def("constant_kernel", &constant_kernel, py::arg("N"));
  m.def("angular_mass", &angular_mass);
  m.def("gain_exponent", [](double p, int N, const std::string &rule) {
    if (rule != "corollary" && rule != "theorem") throw std::invalid_argument("rule must be corollary or theorem");
    return gain_exponent(p, N, rule == "corollary" ? ExponentRule::corollary : ExponentRule::theorem);
  }, py::arg("p"), py::arg("N"), py::arg("rule") = "corollary");

  m.def("maxwellian", &maxwellian, py::arg("grid"), py::arg("rho"), py::arg("u"), py::arg("T"));
  m.def("disk_indicator", &disk_indicator, py::arg("grid"), py::arg("radius"), py::arg("center") = std::vector<double>{});
  m.def("bkw_field", &bkw_field, py::arg("grid"), py::arg("t"));
  m.def("bkw_table", &bkw_table, py::arg("N"), py::arg("times"));

  auto opts = [](int N, int angles) {
    OperatorOptions o = default_options(N);
    if (angles > 0) o.quad = make_sigma_quadrature(N, angles);
    return o;
  };
  m.def("q_plus", [opts](const Field &g, const Field &f, const CollisionKernel &K, int angles) {
    return q_plus(g, f, K, opts(f.grid.N, angles));
  }, py::arg("g"), py::arg("f"), py::arg("kernel"), py::arg("angles") = 0);
  m.def("q_full", [opts](const Field &f, const CollisionKernel &K, int angles) {
    return q_full(f, K, opts(f.grid.N, angles));
  }, py::arg("f"), py::arg("kernel"), py::arg("angles") = 0);
  m.def("loss_rate", [](const Field &f, const CollisionKernel &K) { return loss_rate(f, K); });

  m.def("lp_norm", &lp_norm, py::arg("f"), py::arg("p"), py::arg("k") = 0.0);
  m.def("sobolev_norm", &sobolev_norm, py::arg("f"), py::arg("s"), py::arg("eta") = 0.0);
  m.def("entropy", &entropy);
  m.def("moments", [](const Field &f) {
    const Moments mo = moments(f);
    return py::dict(py::arg("mass") = mo.mass, py::arg("momentum") = mo.momentum, py::arg("energy") = mo.energy,
                    py::arg("temperature") = mo.temperature(f.grid.N));
  });
  m.def("fourier_decay_exponent", [](const Field &f) { return fourier_decay_exponent(f).exponent; });

  m.def("evolve", [](const Field &f0, const CollisionKernel &K, double t_end, double dt) {
    const SchemeOptions o = default_scheme(f0.grid.N);
    SolverState s = init_state(f0, 0.0, K, o);
    advance(s, t_end, dt, K, o);
    return s.f;
  }, py::arg("f0"), py::arg("kernel"), py::arg("t_end"), py::arg("dt") = 0.05);

  m.def("parse_config", [](const std::string &text) { return echo_config(parse_config(text)); },
        "Validates a config and returns its full echo");
  m.def("run", [](const std::string &text, const std::string &out) {
    const RunSummary s = cmd_run(parse_config(text), out);
    return py::dict(py::arg("steps") = s.steps, py::arg("t_final") = s.t_final, py::arg("files") = s.files,
                    py::arg("bkw_error") = s.bkw_error);
  }, py::arg("config"), py::arg("out"));
  m.def("verify", [](const std::string &suite, const std::string &text) { return cmd_verify(suite, parse_config(text)).json(); },
        py::arg("suite"), py::arg("config") = "");
  m.def("kernel_info", [](const std::string &text) { return kernel_info(parse_config(text)); }, py::arg("config") = "");
  m.def("set_num_threads", &set_num_threads);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
}
