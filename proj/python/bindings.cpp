#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "hhdyn/errors.hpp"
#include "hhdyn/scenario.hpp"

namespace py = pybind11;
using namespace hhdyn;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  // explicit strides: the count-only constructor yields zero strides here
  py::array_t<double> out({static_cast<py::ssize_t>(v.size())}, {static_cast<py::ssize_t>(sizeof(double))});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<std::complex<double>> amplitudes(const Wavefunction& psi) {
  const Shape3 s = psi.shape();
  const auto z = static_cast<py::ssize_t>(sizeof(std::complex<double>));
  const auto n1 = static_cast<py::ssize_t>(s.n[1]), n2 = static_cast<py::ssize_t>(s.n[2]);
  py::array_t<std::complex<double>> out({static_cast<py::ssize_t>(s.n[0]), n1, n2}, {n1 * n2 * z, n2 * z, z});
  std::copy(psi.data().begin(), psi.data().end(), out.mutable_data());
  return out;
}

py::dict record_columns(const RunRecord& rec) {
  std::vector<std::vector<double>> cols(run_record_columns().size());
  for (const auto& s : rec.samples) {
    const double row[] = {s.t,       s.norm,    s.energy,    s.energy_a,  s.energy_b, s.mean.r,
                          s.mean.z1, s.mean.z2, s.dz1,       s.dz2,       s.flux.a_e1, s.flux.a_e2,
                          s.flux.b_e1, s.flux.b_e2, s.field_a, s.field_b};
    for (std::size_t c = 0; c < cols.size(); ++c) cols[c].push_back(row[c]);
  }
  py::dict d;
  for (std::size_t c = 0; c < cols.size(); ++c) d[py::str(run_record_columns()[c])] = to_array(cols[c]);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two distant 1D hydrogen atoms on a grid";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.attr("AU_TIME_PER_FS") = kAuTimePerFs;
  m.def("fs_to_au", &fs_to_au);
  m.def("au_to_fs", &au_to_fs);

  m.def("v_pp", &v_pp, py::arg("r"));
  m.def("v_ee", &v_ee, py::arg("z1"), py::arg("z2"), py::arg("alpha") = 1e-4);
  m.def("v_ep", &v_ep, py::arg("z"), py::arg("r"), py::arg("beta") = 1.995);

  py::class_<Grid1D>(m, "Grid1D")
      .def_static("equidistant", &Grid1D::equidistant, py::arg("label"), py::arg("min"), py::arg("max"), py::arg("n"))
      .def_static("hermite", &Grid1D::hermite, py::arg("label"), py::arg("n"), py::arg("scale"))
      .def_property_readonly("nodes", [](const Grid1D& g) { return to_array(g.nodes()); })
      .def_property_readonly("weights", [](const Grid1D& g) { return to_array(g.weights()); })
      .def("__len__", &Grid1D::size);
  py::enum_<AxisLabel>(m, "Axis").value("R", AxisLabel::R).value("Z1", AxisLabel::Z1).value("Z2", AxisLabel::Z2);

  m.def(
      "single_atom_ground_state",
      [](double zmin, double zmax, std::size_t n, double beta, double mu) {
        auto r = relax_single_atom(build_equidistant_grid(zmin, zmax, n), beta, mu);
        return r.energy;
      },
      py::arg("zmin") = -120.0, py::arg("zmax") = 120.0, py::arg("n") = 384, py::arg("beta") = 1.995,
      py::arg("reduced_mass") = 1.0);

  py::class_<PulseConfig>(m, "PulseConfig")
      .def(py::init<>())
      .def_readwrite("amplitude", &PulseConfig::amplitude)
      .def_readwrite("frequency", &PulseConfig::frequency)
      .def_readwrite("duration", &PulseConfig::duration)
      .def_readwrite("cep", &PulseConfig::cep)
      .def_readwrite("envelope", &PulseConfig::envelope)
      .def_readwrite("drive_e1", &PulseConfig::drive_e1)
      .def_readwrite("drive_e2", &PulseConfig::drive_e2)
      .def("electric_field",
           [](const PulseConfig& p, py::array_t<double> t) {
             const auto pulse = p.pulse();
             return py::vectorize([&](double x) { return electric_field(pulse, x); })(t);
           })
      .def("envelope_at",
           [](const PulseConfig& p, py::array_t<double> z) {
             const auto pulse = p.pulse();
             return py::vectorize([&](double x) { return spatial_envelope(pulse, x); })(z);
           })
      .def("effective_amplitudes",
           [](const PulseConfig& p) {
             const auto a = effective_amplitudes(p.pulse());
             return py::make_tuple(a.atom_a, a.atom_b);
           })
      .def("cycle_count", [](const PulseConfig& p) { return p.pulse().cycle_count(); });

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readonly("preset", &ScenarioConfig::preset)
      .def_readwrite("pulse", &ScenarioConfig::pulse)
      .def_property(
          "output_dir", [](const ScenarioConfig& c) { return c.output.dir; },
          [](ScenarioConfig& c, const std::string& d) { c.output.dir = d; })
      .def_property(
          "frozen_r", [](const ScenarioConfig& c) { return c.grid.frozen_r; },
          [](ScenarioConfig& c, bool f) { c.grid.frozen_r = f; })
      .def_property(
          "n_z", [](const ScenarioConfig& c) { return c.grid.n_z; },
          [](ScenarioConfig& c, std::size_t n) { c.grid.n_z = n; })
      .def_property(
          "duration", [](const ScenarioConfig& c) { return c.propagation.duration; },
          [](ScenarioConfig& c, double d) { c.propagation.duration = d; })
      .def_property(
          "initial_kind", [](const ScenarioConfig& c) { return c.initial.kind; },
          [](ScenarioConfig& c, const std::string& k) { c.initial.kind = k; })
      .def("validate", &ScenarioConfig::validate)
      .def("dump", [](const ScenarioConfig& c) { return dump_config(c); });

  m.def("preset_names", &preset_names);
  m.def("preset_config", &preset_config, py::arg("name"));
  m.def("parse_config", &parse_config, py::arg("text"), py::arg("origin") = "<string>");
  m.def("load_config", &load_config, py::arg("path"));

  py::class_<Wavefunction>(m, "Wavefunction")
      .def_property_readonly("amplitudes", &amplitudes)
      .def_property_readonly("z1", [](const Wavefunction& w) { return to_array(w.grid().z1.nodes()); })
      .def_property_readonly("z2", [](const Wavefunction& w) { return to_array(w.grid().z2.nodes()); })
      .def("norm", &Wavefunction::norm)
      .def("density", [](const Wavefunction& w, int which) {
        return to_array(electron_density(w, which == 1 ? Electron::E1 : Electron::E2));
      }, py::arg("electron"))
      .def("expectations", [](const Wavefunction& w) {
        const auto e = expectations(w);
        return py::make_tuple(e.r, e.z1, e.z2);
      })
      .def("exchange_symmetry_defect", &exchange_symmetry_defect);
  m.def("read_snapshot", &read_snapshot, py::arg("path"));
  m.def("write_snapshot", &write_snapshot, py::arg("psi"), py::arg("path"));

  m.def(
      "relax",
      [](const ScenarioConfig& c) {
        std::optional<InitialState> init;
        {
          py::gil_scoped_release release;
          init.emplace(prepare_initial_state(c));
        }
        return py::make_tuple(std::move(init->psi), init->energy, init->relax_steps);
      },
      py::arg("config"), "Seed and relax the initial state; returns (psi, energy, steps).");
  m.def(
      "energies",
      [](const Wavefunction& psi, const std::string& partition) {
        PhysicalParams params;
        EnergyEvaluator ev(psi.grid(), params);
        const auto t = ev.terms(psi);
        const auto e = partition_energies(t, partition == "entangled" ? EnergyPartition::Entangled
                                                                       : EnergyPartition::DirectProduct);
        return py::make_tuple(t.total(), e.atom_a, e.atom_b);
      },
      py::arg("psi"), py::arg("partition") = "direct-product");
  m.def(
      "run_scenario",
      [](const ScenarioConfig& c) {
        RunRecord rec;
        {
          py::gil_scoped_release release;
          rec = run_scenario(c).record;
        }
        return record_columns(rec);
      },
      py::arg("config"), "Run a scenario, write its artifacts and return the run record as column arrays.");
}
