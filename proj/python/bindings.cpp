#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loopsoup/condensate.hpp"
#include "loopsoup/finite_volume.hpp"
#include "loopsoup/full_hyl.hpp"
#include "loopsoup/monte_carlo.hpp"
#include "loopsoup/special_functions.hpp"
#include "loopsoup/thermo.hpp"

namespace py = pybind11;
using namespace loopsoup;

PYBIND11_MODULE(_loopsoup, m) {
  m.doc() = "Loop-soup condensation toolkit";

  m.def("polylog", [](double s, double z) { return polylog(s, z); }, py::arg("s"), py::arg("z"));
  m.def("zeta", &zeta, py::arg("s"));
  m.def("lambert_w_m1", [](double x) { return lambert_w_m1(x); }, py::arg("x"));
  m.def("c_d", &c_d, py::arg("d"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](int d, double beta) { return ModelParams{d, beta}; }), py::arg("d") = 3, py::arg("beta") = 1.0)
      .def_readwrite("d", &ModelParams::d)
      .def_readwrite("beta", &ModelParams::beta)
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(d=" + std::to_string(p.d) + ", beta=" + std::to_string(p.beta) + ")";
      });

  py::class_<HYLParams>(m, "HYLParams")
      .def(py::init([](double a, double b) { return HYLParams{a, b}; }), py::arg("a") = 0.0, py::arg("b") = 1.0)
      .def_readwrite("a", &HYLParams::a)
      .def_readwrite("b", &HYLParams::b);

  m.def("pressure", &pressure, py::arg("params"), py::arg("mu"));
  m.def("density", &density, py::arg("params"), py::arg("mu"));
  m.def("critical_density", &critical_density, py::arg("params"));
  m.def("mu_of_rho", &mu_of_rho, py::arg("params"), py::arg("rho"));
  m.def("rate_I", &rate_I, py::arg("params"), py::arg("mu_ref"), py::arg("x"));

  py::class_<CondensateSolution>(m, "CondensateSolution")
      .def_readonly("rho_total", &CondensateSolution::rho_total)
      .def_readonly("rho_e", &CondensateSolution::rho_e)
      .def_readonly("rho_S", &CondensateSolution::rho_S)
      .def_readonly("rho_bar", &CondensateSolution::rho_bar)
      .def_readonly("S_value", &CondensateSolution::S_value)
      .def_readonly("S_1", &CondensateSolution::S_1)
      .def_property_readonly("branch", [](const CondensateSolution& s) { return to_string(s.branch); });

  m.def("solve_rho_bar", &solve_rho_bar, py::arg("params"), py::arg("hyl"), py::arg("rho"));
  m.def(
      "critical_density_hyl",
      [](const ModelParams& p, const HYLParams& h) {
        auto c = critical_density_hyl(p, h);
        return py::make_tuple(c.rho_c_hyl, c.jump_size);
      },
      py::arg("params"), py::arg("hyl"), "(rho_c_hyl, jump_size)");
  m.def("b_critical", &b_critical, py::arg("params"));
  m.def("free_energy", &free_energy, py::arg("params"), py::arg("hyl"), py::arg("rho"));
  m.def("rho_gc", &rho_gc, py::arg("params"), py::arg("hyl"), py::arg("mu"));
  m.def("pressure_hyl", &pressure_hyl, py::arg("params"), py::arg("hyl"), py::arg("mu"));
  m.def("rho_mean_field", &rho_mean_field, py::arg("params"), py::arg("a"), py::arg("mu"));

  m.def(
      "pressure_gap",
      [](const ModelParams& p, const HYLParams& h, double mu, std::size_t jmax) {
        auto g = pressure_gap(p, h, mu, jmax);
        py::dict d;
        d["gap"] = g.gap;
        d["lower_bound"] = g.lower_bound;
        d["x1_star"] = g.x1_star;
        d["jmax_used"] = g.jmax_used;
        return d;
      },
      py::arg("params"), py::arg("hyl"), py::arg("mu"), py::arg("jmax") = 500);

  py::class_<FiniteVolumeModel>(m, "FiniteVolumeModel")
      .def(py::init([](double V, const ModelParams& p, std::int64_t q, const HYLParams& h, double mu) {
             FiniteVolumeModel fm{V, p, q > 0 ? q : FiniteVolumeModel::default_q(V), h, mu};
             fm.validate();
             return fm;
           }),
           py::arg("V"), py::arg("params") = ModelParams{}, py::arg("q") = 0, py::arg("hyl") = HYLParams{},
           py::arg("mu") = 0.0)
      .def_readwrite("V", &FiniteVolumeModel::V)
      .def_readwrite("q", &FiniteVolumeModel::q)
      .def_readwrite("mu", &FiniteVolumeModel::mu)
      .def_readwrite("params", &FiniteVolumeModel::params)
      .def_readwrite("hyl", &FiniteVolumeModel::hyl);

  m.def("intensity", &intensity, py::arg("model"), py::arg("j"));
  m.def("free_canonical_pmf", &free_canonical_pmf, py::arg("model"), py::arg("N_max"));
  m.def("long_loop_density_exact", &long_loop_density_exact, py::arg("model"), py::arg("N"));
  m.def("log_partition_asymptotic", &log_partition_asymptotic, py::arg("model"), py::arg("rho"));
  m.def(
      "canonical_log_partition",
      [](const FiniteVolumeModel& fm, std::int64_t N) { return canonical_hyl_partition(fm, N).log_Z_canonical; },
      py::arg("model"), py::arg("N"));

  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init([](std::uint64_t seed, int n_chains, std::int64_t sweeps, std::int64_t burn_in) {
             SamplerConfig c;
             c.seed = seed;
             c.n_chains = n_chains;
             c.sweeps = sweeps;
             c.burn_in = burn_in;
             c.validate();
             return c;
           }),
           py::arg("seed") = 1, py::arg("n_chains") = 1, py::arg("sweeps") = 10000, py::arg("burn_in") = 1000)
      .def_readwrite("seed", &SamplerConfig::seed)
      .def_readwrite("n_chains", &SamplerConfig::n_chains)
      .def_readwrite("sweeps", &SamplerConfig::sweeps)
      .def_readwrite("burn_in", &SamplerConfig::burn_in);

  py::class_<EstimateReport>(m, "EstimateReport")
      .def_readonly("mean", &EstimateReport::mean)
      .def_readonly("std_error", &EstimateReport::std_error)
      .def_readonly("ess", &EstimateReport::ess)
      .def_readonly("acceptance_rates", &EstimateReport::acceptance_rates)
      .def_readonly("samples", &EstimateReport::samples)
      .def_readonly("bimodality_coefficient", &EstimateReport::bimodality_coefficient);

  m.def(
      "estimate_long_density",
      [](const FiniteVolumeModel& fm, std::int64_t N, const SamplerConfig& c) {
        py::gil_scoped_release nogil;
        return estimate_long_density(fm, N, c);
      },
      py::arg("model"), py::arg("N"), py::arg("config"));
  m.def(
      "estimate_gc_density",
      [](const FiniteVolumeModel& fm, const SamplerConfig& c, const std::string& interaction) {
        Interaction i = interaction == "free" ? Interaction::free
                        : interaction == "pmf" ? Interaction::pmf
                        : interaction == "hyl" ? Interaction::hyl
                                               : throw py::value_error("interaction must be free, pmf or hyl");
        py::gil_scoped_release nogil;
        return estimate_gc_density(fm, c, i);
      },
      py::arg("model"), py::arg("config"), py::arg("interaction") = "hyl");
}
