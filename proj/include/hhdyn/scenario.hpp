#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hhdyn/observables.hpp"
#include "hhdyn/propagator.hpp"
#include "hhdyn/state.hpp"

namespace hhdyn {

struct GridConfig {
  double z_min = -120.0;
  double z_max = 120.0;
  std::size_t n_z = 384;
  std::string z_kind = "fourier";  ///< fourier | hermite
  double hermite_scale = 5.0;
  double r_min = 75.0;
  double r_max = 125.0;
  std::size_t n_r = 256;
  bool frozen_r = false;
};

struct PulseConfig {
  double amplitude = 0.0;
  double frequency = 1.0;
  double duration = fs_to_au(5.0);
  double cep = 0.0;
  std::string envelope = "none";  ///< none | uniform | gaussian | narrow
  GaussianEnvelope gaussian;
  NarrowEnvelope narrow;
  bool drive_e1 = true;
  bool drive_e2 = true;

  LaserPulse pulse() const;
};

struct InitialConfig {
  std::string kind = "direct-product";  ///< direct-product | entangled
  double r0 = 100.0;
  double sigma_r = 0.5;
  double z_a = -50.0;
  double z_b = 50.0;
  double dtau = 0.02;
  double tolerance = 1e-10;
  std::size_t max_steps = 200000;
  std::string hamiltonian = "auto";  ///< auto | reduced | full
  bool freeze_r = true;
  double polish_time = 40.0;  ///< real-time spectral filter window (a.u.), 0 disables
  std::string state_file;  ///< load instead of relaxing when non-empty

  InitialStateSpec spec() const;
};

struct OutputConfig {
  std::string dir = "out";
  std::string snapshot_times = "auto";  ///< "auto" = t_p, t_p + 2.5 fs, end; else comma list in a.u.
  bool write_states = true;
};

/// Everything a run needs; every field has a file key (see config_keys()).
struct ScenarioConfig {
  std::string preset = "none";
  GridConfig grid;
  PhysicalParams physics;
  PulseConfig pulse;
  InitialConfig initial;
  PropagationSettings propagation;
  std::string partition = "auto";  ///< auto | direct-product | entangled
  std::string resume_from;         ///< earlier output directory to continue from
  OutputConfig output;

  EnergyPartition energy_partition() const;
  std::vector<double> snapshot_schedule() const;
  ProductGrid product_grid() const;
  void validate() const;
};

struct ConfigKey {
  std::string section;
  std::string name;
  std::string doc;
};

/// All accepted keys as "section.name", in file order.
std::vector<ConfigKey> config_keys();

std::vector<std::string> preset_names();
/// Defaults with the named preset applied; unknown names list the valid ones.
ScenarioConfig preset_config(const std::string& name);

ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ScenarioConfig load_config(const std::filesystem::path& path);
/// Fully explicit INI text that parses back to the same config.
std::string dump_config(const ScenarioConfig& config);

struct InitialState {
  Wavefunction psi;
  double energy = 0.0;  ///< <H> of the relaxation Hamiltonian (NaN when loaded from file)
  std::size_t relax_steps = 0;
};

/// Seeds and relaxes, or loads initial.state_file.
InitialState prepare_initial_state(const ScenarioConfig& config);

/// Relaxes and writes config.expanded.ini, initial_state.hhwf and relax.json.
InitialState relax_scenario(const ScenarioConfig& config);

struct ScenarioResult {
  InitialState initial;
  RunRecord record;
};

/// Full run: writes config.expanded.ini, run_record.csv, density snapshots,
/// final_state.hhwf and summary.json into output.dir. Partial records are
/// flushed before an exception propagates.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Machine-readable error record (also written to <dir>/error.json when possible).
std::string error_record(const std::string& kind, const std::string& message, int exit_code);

}  // namespace hhdyn
