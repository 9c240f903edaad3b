#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nemel/config.hpp"
#include "nemel/energy.hpp"
#include "nemel/equilibrium.hpp"
#include "nemel/sim.hpp"
#include "nemel/verify.hpp"

namespace py = pybind11;
using namespace nemel;

namespace {

py::array_t<double> cell_to_numpy(const Grid& g, const CellField& f) {
  py::array_t<double> out({g.ny, g.nx});
  auto buf = out.mutable_unchecked<2>();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) buf(j, i) = f[g.cidx(i, j)];
  return out;
}

CellField numpy_to_cell(const Grid& g, const py::array_t<double>& arr) {
  if (arr.ndim() != 2 || arr.shape(0) != g.ny || arr.shape(1) != g.nx) {
    throw config_error("array shape must be (ny, nx)");
  }
  CellField f(g);
  auto buf = arr.unchecked<2>();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) f[g.cidx(i, j)] = buf(j, i);
  return f;
}

Mat2 mat_from_tuple(const std::array<double, 4>& m) { return Mat2{m[0], m[1], m[2], m[3]}; }

}  // namespace

PYBIND11_MODULE(_nemel, m) {
  m.doc() = "2D nematic electrolyte simulator: ion electrodiffusion, anisotropic "
            "electrostatics, incompressible flow, and director dynamics";

  py::register_exception<config_error>(m, "ConfigError");
  py::register_exception<numerical_error>(m, "NumericalError");

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, int, double, double>(), py::arg("nx"), py::arg("ny"),
           py::arg("Lx") = 1.0, py::arg("Ly") = 1.0)
      .def_readonly("nx", &Grid::nx)
      .def_readonly("ny", &Grid::ny)
      .def_readonly("Lx", &Grid::Lx)
      .def_readonly("Ly", &Grid::Ly)
      .def_readonly("hx", &Grid::hx)
      .def_readonly("hy", &Grid::hy);

  py::class_<LeslieCoefficients>(m, "LeslieCoefficients")
      .def(py::init([](double a1, double a2, double a3, double a4, double a5, double a6) {
             return LeslieCoefficients{a1, a2, a3, a4, a5, a6};
           }),
           py::arg("alpha1"), py::arg("alpha2"), py::arg("alpha3"), py::arg("alpha4"),
           py::arg("alpha5"), py::arg("alpha6"))
      .def_readwrite("alpha1", &LeslieCoefficients::alpha1)
      .def_readwrite("alpha2", &LeslieCoefficients::alpha2)
      .def_readwrite("alpha3", &LeslieCoefficients::alpha3)
      .def_readwrite("alpha4", &LeslieCoefficients::alpha4)
      .def_readwrite("alpha5", &LeslieCoefficients::alpha5)
      .def_readwrite("alpha6", &LeslieCoefficients::alpha6)
      .def_property_readonly("gamma1", &LeslieCoefficients::gamma1)
      .def_property_readonly("gamma2", &LeslieCoefficients::gamma2)
      .def_property_readonly("beta", &LeslieCoefficients::beta)
      .def_property_readonly("mu0", &LeslieCoefficients::mu0);

  py::class_<HpParams>(m, "HpParams")
      .def_readonly("mu_s", &HpParams::mu_s)
      .def_readonly("mu_0", &HpParams::mu_0)
      .def_readonly("mu_V", &HpParams::mu_v)
      .def_readonly("mu_D", &HpParams::mu_d)
      .def_readonly("mu_L", &HpParams::mu_l)
      .def_readonly("mu_P", &HpParams::mu_p);

  py::class_<ValidityReport>(m, "ValidityReport")
      .def_readonly("satisfies_positivity", &ValidityReport::satisfies_positivity)
      .def_readonly("parodi_holds", &ValidityReport::parodi_holds)
      .def_readonly("weak_conditions_hold", &ValidityReport::weak_conditions_hold)
      .def_readonly("delta", &ValidityReport::delta)
      .def_readonly("gamma1", &ValidityReport::gamma1)
      .def_readonly("gamma2", &ValidityReport::gamma2)
      .def_readonly("beta", &ValidityReport::beta)
      .def_readonly("mu0", &ValidityReport::mu0)
      .def_readonly("hp", &ValidityReport::hp)
      .def_readonly("violations", &ValidityReport::violations);

  m.def("validate_leslie", &validate_leslie, py::arg("coefficients"),
        py::arg("parodi_tol") = kDefaultParodiTol);

  m.def(
      "epsilon_tensor",
      [](std::pair<double, double> d, double eps_perp, double eps_a) {
        const Mat2 e = epsilon_tensor({d.first, d.second}, Permittivity{eps_perp, eps_a});
        return std::array<double, 4>{e.xx, e.xy, e.yx, e.yy};
      },
      py::arg("d"), py::arg("eps_perp"), py::arg("eps_a"));

  m.def(
      "projector",
      [](std::pair<double, double> d) {
        const Mat2 p = projector({d.first, d.second});
        return std::array<double, 4>{p.xx, p.xy, p.yx, p.yy};
      },
      py::arg("d"));

  m.def(
      "leslie_stress",
      [](const LeslieCoefficients& c, const std::array<double, 4>& Dv,
         std::pair<double, double> d, std::pair<double, double> d_ring) {
        const Mat2 s = leslie_stress(c, mat_from_tuple(Dv), {d.first, d.second},
                                     {d_ring.first, d_ring.second});
        return std::array<double, 4>{s.xx, s.xy, s.yx, s.yy};
      },
      py::arg("coefficients"), py::arg("Dv"), py::arg("d"), py::arg("d_ring"));

  m.def(
      "dissipation_quadratic_form",
      [](const LeslieCoefficients& c, std::pair<double, double> d,
         const std::array<double, 4>& Dv, std::pair<double, double> a) {
        return dissipation_quadratic_form(c, {d.first, d.second}, mat_from_tuple(Dv),
                                          {a.first, a.second});
      },
      py::arg("coefficients"), py::arg("d"), py::arg("Dv"), py::arg("a"));

  m.def(
      "solve_poisson",
      [](const Grid& g, const py::array_t<double>& rho, const py::array_t<double>& d1,
         const py::array_t<double>& d2, double eps_perp, double eps_a, double tol) {
        EllipticProblem p;
        p.grid = g;
        CellVecField d(g);
        d.x = numpy_to_cell(g, d1);
        d.y = numpy_to_cell(g, d2);
        p.eps = epsilon_field(g, d, Permittivity{eps_perp, eps_a});
        p.rhs = numpy_to_cell(g, rho);
        p.tol = tol;
        return cell_to_numpy(g, solve_aniso_dirichlet(p));
      },
      py::arg("grid"), py::arg("rho"), py::arg("d1"), py::arg("d2"), py::arg("eps_perp") = 1.0,
      py::arg("eps_a") = 0.0, py::arg("tol") = 1e-10,
      "Solve -div(eps(d) grad phi) = rho with phi = 0 on the walls");

  m.def(
      "solve_poisson_boltzmann",
      [](const Grid& g, const std::vector<double>& valences, const std::vector<double>& Z,
         double eps_perp, double eps_a, double tol) {
        CellVecField d(g);
        for (std::size_t k = 0; k < g.cells(); ++k) d.x.a[k] = 1.0;
        PbOptions opt;
        opt.tol = tol;
        const CellField phi = solve_poisson_boltzmann(
            g, epsilon_field(g, d, Permittivity{eps_perp, eps_a}), valences, Z, opt);
        return cell_to_numpy(g, phi);
      },
      py::arg("grid"), py::arg("valences"), py::arg("Z"), py::arg("eps_perp") = 1.0,
      py::arg("eps_a") = 0.0, py::arg("tol") = 1e-10);

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("e_kinetic", &EnergyReport::e_kinetic)
      .def_readonly("e_elastic", &EnergyReport::e_elastic)
      .def_readonly("e_entropy", &EnergyReport::e_entropy)
      .def_readonly("e_electric", &EnergyReport::e_electric)
      .def_readonly("e_total", &EnergyReport::e_total)
      .def_readonly("d_ionic", &EnergyReport::d_ionic)
      .def_readonly("d_viscous", &EnergyReport::d_viscous)
      .def_readonly("d_rotational", &EnergyReport::d_rotational)
      .def_readonly("d_total", &EnergyReport::d_total)
      .def_readonly("d_viscous_dvd", &EnergyReport::d_viscous_dvd)
      .def_readonly("d_ionic_alpha_bound", &EnergyReport::d_ionic_alpha_bound);

  py::class_<ResidualRecord>(m, "ResidualRecord")
      .def_readonly("v_inf", &ResidualRecord::v_inf)
      .def_readonly("grad_mu_inf", &ResidualRecord::grad_mu_inf)
      .def_readonly("d_ring_inf", &ResidualRecord::d_ring_inf)
      .def_readonly("director_inf", &ResidualRecord::director_inf)
      .def("max_component", &ResidualRecord::max_component);

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("steps", &RunSummary::steps)
      .def_readonly("final_t", &RunSummary::final_t)
      .def_readonly("verdict", &RunSummary::verdict)
      .def_readonly("max_len_dev", &RunSummary::max_len_dev)
      .def_readonly("min_c", &RunSummary::min_c)
      .def_readonly("max_mass_drift", &RunSummary::max_mass_drift)
      .def_readonly("final_residual", &RunSummary::final_residual)
      .def_readonly("energy_log_path", &RunSummary::energy_log_path)
      .def_readonly("output_dir", &RunSummary::output_dir);

  m.def(
      "run_config_file",
      [](const std::string& path, const std::string& out_dir, long max_steps,
         bool override_validity) {
        ParsedConfig parsed = parse_config(path, override_validity);
        if (!out_dir.empty()) parsed.run.output_dir = out_dir;
        if (max_steps >= 0) parsed.run.max_steps = max_steps;
        return run(parsed.run);
      },
      py::arg("path"), py::arg("out_dir") = "", py::arg("max_steps") = -1,
      py::arg("override_validity") = false, "Parse a TOML config and run the simulation");

  m.def(
      "run_smoke",
      [](int n, const std::string& out_dir, long max_steps) {
        RunConfig cfg = verify::smoke_config(n, out_dir);
        cfg.max_steps = max_steps;
        return run(cfg);
      },
      py::arg("n") = 32, py::arg("out_dir") = "nemel_out", py::arg("max_steps") = 100,
      "Run the standard coupled smoke scenario");

  m.def(
      "verify_suite",
      [](const std::string& name, int size) {
        const verify::SuiteResult res = verify::run_suite(name, size);
        py::list checks;
        for (const auto& c : res.checks) {
          checks.append(py::make_tuple(c.name, c.passed, c.detail));
        }
        return py::make_tuple(res.passed(), checks);
      },
      py::arg("name"), py::arg("size") = 64);

  m.attr("__version__") = "0.1.0";
}
