#include "hhdyn/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "hhdyn/errors.hpp"

namespace hhdyn {
namespace {

namespace fs = std::filesystem;

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + text + "' is not a nonnegative integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key + ": '" + text + "' is not a boolean (true/false)");
}

struct Range {
  double lo, hi;
  bool lo_open = false, hi_open = false;
};

void check_range(const std::string& key, double v, Range r) {
  const bool low_ok = r.lo_open ? v > r.lo : v >= r.lo;
  const bool high_ok = r.hi_open ? v < r.hi : v <= r.hi;
  if (!low_ok || !high_ok) {
    throw ConfigError(key + " = " + format_double(v) + " is out of range " + (r.lo_open ? "(" : "[") +
                      format_double(r.lo) + ", " + format_double(r.hi) + (r.hi_open ? ")" : "]"));
  }
}

struct KeyHandler {
  ConfigKey key;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class Access>
KeyHandler real_key(const char* section, const char* name, const char* doc, Access access, Range range) {
  return {{section, name, doc},
          [access, range](ScenarioConfig& c, const std::string& key, const std::string& v) {
            const double x = parse_double(key, v);
            check_range(key, x, range);
            access(c) = x;
          },
          [access](const ScenarioConfig& c) { return format_double(access(c)); }};
}

template <class Access>
KeyHandler count_key(const char* section, const char* name, const char* doc, Access access, Range range) {
  return {{section, name, doc},
          [access, range](ScenarioConfig& c, const std::string& key, const std::string& v) {
            const std::size_t x = parse_count(key, v);
            check_range(key, static_cast<double>(x), range);
            access(c) = x;
          },
          [access](const ScenarioConfig& c) { return std::to_string(access(c)); }};
}

template <class Access>
KeyHandler bool_key(const char* section, const char* name, const char* doc, Access access) {
  return {{section, name, doc},
          [access](ScenarioConfig& c, const std::string& key, const std::string& v) {
            access(c) = parse_bool(key, v);
          },
          [access](const ScenarioConfig& c) {
            return std::string(access(c) ? "true" : "false");
          }};
}

template <class Access>
KeyHandler text_key(const char* section, const char* name, const char* doc, Access access,
                    std::initializer_list<const char*> choices = {}) {
  std::vector<std::string> allowed(choices.begin(), choices.end());
  return {{section, name, doc},
          [access, allowed](ScenarioConfig& c, const std::string& key, const std::string& v) {
            if (!allowed.empty()) {
              bool ok = false;
              std::string list;
              for (const auto& a : allowed) {
                ok = ok || a == v;
                list += (list.empty() ? "" : ", ") + a;
              }
              if (!ok) throw ConfigError(key + ": '" + v + "' is not one of {" + list + "}");
            }
            access(c) = v;
          },
          [access](const ScenarioConfig& c) { return access(c); }};
}

#define FIELD(expr) [](auto& c) -> auto& { return c.expr; }

const std::vector<KeyHandler>& handlers() {
  constexpr double big = 1e9;
  static const std::vector<KeyHandler> table = {
      real_key("grid", "z_min", "lower end of both electron axes (a.u.)", FIELD(grid.z_min), {-1e5, 0, false, true}),
      real_key("grid", "z_max", "upper end of both electron axes (a.u.)", FIELD(grid.z_max), {0, 1e5, true, false}),
      count_key("grid", "n_z", "points per electron axis", FIELD(grid.n_z), {16, 16384}),
      text_key("grid", "z_kind", "electron axis discretization", FIELD(grid.z_kind), {"fourier", "hermite"}),
      real_key("grid", "hermite_scale", "length scale of Hermite nodes (a.u.)", FIELD(grid.hermite_scale),
               {0, 100, true, false}),
      real_key("grid", "r_min", "lower end of the R axis (a.u.)", FIELD(grid.r_min), {0, 1e4, true, false}),
      real_key("grid", "r_max", "upper end of the R axis (a.u.)", FIELD(grid.r_max), {0, 1e4, true, false}),
      count_key("grid", "n_r", "points on the R axis", FIELD(grid.n_r), {8, 8192}),
      bool_key("grid", "frozen_r", "clamp R at initial.r0 and drop the R axis", FIELD(grid.frozen_r)),

      real_key("physics", "proton_mass", "m_p (electron masses)", FIELD(physics.proton_mass), {1, 1e7, false, false}),
      real_key("physics", "alpha", "electron-electron softening (a.u.^2)", FIELD(physics.alpha), {0, 100, true, false}),
      real_key("physics", "beta", "electron-proton softening (a.u.^2)", FIELD(physics.beta), {0, 100, true, false}),

      real_key("pulse", "amplitude", "E0 (a.u.)", FIELD(pulse.amplitude), {0, 100}),
      real_key("pulse", "frequency", "omega (a.u.)", FIELD(pulse.frequency), {0, 100, true, false}),
      real_key("pulse", "duration", "t_p (a.u.)", FIELD(pulse.duration), {0, 1e6, true, false}),
      real_key("pulse", "cep", "carrier-envelope phase (rad)", FIELD(pulse.cep), {-100, 100}),
      text_key("pulse", "envelope", "spatial envelope", FIELD(pulse.envelope), {"none", "uniform", "gaussian", "narrow"}),
      real_key("pulse", "gaussian_width", "lambda (a.u.)", FIELD(pulse.gaussian.width), {0, 1e7, true, false}),
      real_key("pulse", "gaussian_center", "z0 (a.u.)", FIELD(pulse.gaussian.center), {-1e7, 1e7}),
      real_key("pulse", "narrow_start", "z_a of the narrow envelope (a.u.)", FIELD(pulse.narrow.start), {-1e5, 1e5}),
      real_key("pulse", "narrow_end", "z_b of the narrow envelope (a.u.)", FIELD(pulse.narrow.end), {-1e5, 1e5}),
      bool_key("pulse", "drive_e1", "laser acts on electron 1", FIELD(pulse.drive_e1)),
      bool_key("pulse", "drive_e2", "laser acts on electron 2", FIELD(pulse.drive_e2)),

      text_key("initial", "kind", "initial electronic state", FIELD(initial.kind), {"direct-product", "entangled"}),
      real_key("initial", "r0", "nuclear separation (a.u.)", FIELD(initial.r0), {0, 1e4, true, false}),
      real_key("initial", "sigma_r", "nuclear Gaussian width (a.u.)", FIELD(initial.sigma_r), {0, 100, true, false}),
      real_key("initial", "z_a", "atom A center (a.u.)", FIELD(initial.z_a), {-1e5, 1e5}),
      real_key("initial", "z_b", "atom B center (a.u.)", FIELD(initial.z_b), {-1e5, 1e5}),
      real_key("initial", "dtau", "imaginary time step (a.u.)", FIELD(initial.dtau), {0, 10, true, false}),
      real_key("initial", "tolerance", "energy change per step at convergence (a.u.)", FIELD(initial.tolerance),
               {0, 1, true, false}),
      count_key("initial", "max_steps", "imaginary time step limit", FIELD(initial.max_steps), {1, big}),
      text_key("initial", "hamiltonian", "relaxation Hamiltonian", FIELD(initial.hamiltonian),
               {"auto", "reduced", "full"}),
      bool_key("initial", "freeze_r", "keep the nuclear factor fixed while relaxing", FIELD(initial.freeze_r)),
      real_key("initial", "polish_time", "real-time spectral filter window after relaxing (a.u.), 0 = off",
               FIELD(initial.polish_time), {0, 1e5}),
      text_key("initial", "state_file", "HHWF file to start from instead of relaxing", FIELD(initial.state_file)),

      real_key("propagation", "dt", "time step (a.u.)", FIELD(propagation.dt), {0, 10, true, false}),
      real_key("propagation", "duration", "end time of the run (a.u.)", FIELD(propagation.duration), {0, 1e7}),
      count_key("propagation", "output_stride", "steps between run-record rows", FIELD(propagation.output_stride),
                {1, big}),
      real_key("propagation", "detector", "flux planes at +-detector (a.u.)", FIELD(propagation.detector),
               {0, 1e5, true, false}),
      text_key("propagation", "partition", "atomic energy partition", FIELD(partition),
               {"auto", "direct-product", "entangled"}),
      text_key("propagation", "resume_from", "output directory of a run to continue", FIELD(resume_from)),

      bool_key("cap", "enabled", "absorbing potentials on", FIELD(propagation.cap.enabled)),
      real_key("cap", "z_start", "absorber onset on the electron axes (a.u.)", FIELD(propagation.cap.z_start),
               {0, 1e5, true, false}),
      real_key("cap", "z_width", "ramp width on the electron axes (a.u.)", FIELD(propagation.cap.z_width),
               {0, 1e5, true, false}),
      real_key("cap", "z_strength", "eta on the electron axes (a.u.)", FIELD(propagation.cap.z_strength), {0, 100}),
      {{"cap", "order", "ramp exponent"},
       [](ScenarioConfig& c, const std::string& key, const std::string& v) {
         const auto x = parse_count(key, v);
         check_range(key, static_cast<double>(x), {1, 8});
         c.propagation.cap.order = static_cast<int>(x);
       },
       [](const ScenarioConfig& c) { return std::to_string(c.propagation.cap.order); }},
      real_key("cap", "r_low_end", "inner end of the low-R ramp (a.u.)", FIELD(propagation.cap.r_low_end),
               {0, 1e4, true, false}),
      real_key("cap", "r_high_start", "inner end of the high-R ramp (a.u.)", FIELD(propagation.cap.r_high_start),
               {0, 1e4, true, false}),
      real_key("cap", "r_width", "R ramp width (a.u.)", FIELD(propagation.cap.r_width), {0, 1e4, true, false}),
      real_key("cap", "r_strength", "eta on R (a.u.)", FIELD(propagation.cap.r_strength), {0, 100}),

      text_key("output", "dir", "output directory", FIELD(output.dir)),
      text_key("output", "snapshot_times", "density snapshot times: auto or comma list (a.u.)",
               FIELD(output.snapshot_times)),
      bool_key("output", "write_states", "write initial and final HHWF snapshots", FIELD(output.write_states)),
  };
  return table;
}

#undef FIELD

using PresetFn = void (*)(ScenarioConfig&);

void dp_gauss(ScenarioConfig& c) {
  c.initial.kind = "direct-product";
  c.pulse.amplitude = 1.0;
  c.pulse.envelope = "gaussian";
}
void dp_narrow(ScenarioConfig& c) {
  c.initial.kind = "direct-product";
  c.pulse.amplitude = 0.02;
  c.pulse.envelope = "narrow";
}
void ent_gauss(ScenarioConfig& c) {
  dp_gauss(c);
  c.initial.kind = "entangled";
}
void ent_narrow(ScenarioConfig& c) {
  dp_narrow(c);
  c.initial.kind = "entangled";
}
void mask_e1(ScenarioConfig& c) {
  ent_narrow(c);
  c.pulse.drive_e2 = false;
}
void mask_e2(ScenarioConfig& c) {
  ent_narrow(c);
  c.pulse.drive_e1 = false;
}

const std::vector<std::pair<std::string, PresetFn>>& base_presets() {
  static const std::vector<std::pair<std::string, PresetFn>> p = {
      {"fig2-gauss", dp_gauss},        {"fig2-narrow", dp_narrow},  {"fig5-gauss-entangled", ent_gauss},
      {"fig5-narrow-entangled", ent_narrow}, {"fig7c-mask-e1", mask_e1}, {"fig7d-mask-e2", mask_e2},
  };
  return p;
}

void apply_preset(ScenarioConfig& c, const std::string& name) {
  c.preset = name;
  if (name == "none") return;
  std::string base = name;
  const bool desk = base.size() > 3 && base.ends_with("-2d");
  if (desk) base.resize(base.size() - 3);
  for (const auto& [n, fn] : base_presets()) {
    if (n == base) {
      fn(c);
      if (desk) c.grid.frozen_r = true;
      return;
    }
  }
  std::string list;
  for (const auto& p : preset_names()) list += (list.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + name + "'; available presets: " + list);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw NumericalError("cannot write " + path.string());
}

std::string time_tag(double t) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << t;
  return s.str();
}

void write_snapshot_files(const RunRecord& record, const DensitySnapshot& d, const fs::path& dir) {
  const std::string tag = time_tag(d.t);
  write_density_csv(record.z1_nodes, d.p1, dir / ("density_e1_t" + tag + ".csv"));
  write_density_csv(record.z2_nodes, d.p2, dir / ("density_e2_t" + tag + ".csv"));
  write_density_csv(record.z1_nodes, d.dp1, dir / ("delta_e1_t" + tag + ".csv"), "dP");
  write_density_csv(record.z2_nodes, d.dp2, dir / ("delta_e2_t" + tag + ".csv"), "dP");
}

nlohmann::json flux_json(const FluxAccumulators& f) {
  return {{"I_A_e1", f.a_e1}, {"I_A_e2", f.a_e2}, {"I_B_e1", f.b_e1}, {"I_B_e2", f.b_e2}};
}

}  // namespace

LaserPulse PulseConfig::pulse() const {
  LaserPulse p;
  p.amplitude = amplitude;
  p.frequency = frequency;
  p.duration = duration;
  p.cep = cep;
  if (envelope == "uniform") p.envelope = UniformEnvelope{};
  else if (envelope == "gaussian") p.envelope = gaussian;
  else if (envelope == "narrow") p.envelope = narrow;
  else p.envelope = NoEnvelope{};
  p.drive_e1 = drive_e1;
  p.drive_e2 = drive_e2;
  return p;
}

InitialStateSpec InitialConfig::spec() const {
  const InitialKind k = kind == "entangled" ? InitialKind::EntangledSinglet : InitialKind::DirectProduct;
  InitialStateSpec s = InitialStateSpec::defaults_for(k);
  s.r0 = r0;
  s.sigma_r = sigma_r;
  s.z_a = z_a;
  s.z_b = z_b;
  s.relax.dtau = dtau;
  s.relax.tolerance = tolerance;
  s.relax.max_steps = max_steps;
  s.relax.freeze_r = freeze_r;
  if (hamiltonian == "reduced") s.relax.hamiltonian = PotentialKind::ReducedNoninteracting;
  if (hamiltonian == "full") s.relax.hamiltonian = PotentialKind::Full;
  return s;
}

EnergyPartition ScenarioConfig::energy_partition() const {
  if (partition == "direct-product") return EnergyPartition::DirectProduct;
  if (partition == "entangled") return EnergyPartition::Entangled;
  return initial.kind == "entangled" ? EnergyPartition::Entangled : EnergyPartition::DirectProduct;
}

std::vector<double> ScenarioConfig::snapshot_schedule() const {
  if (output.snapshot_times == "auto") {
    std::vector<double> t{pulse.duration, pulse.duration + fs_to_au(2.5), propagation.duration};
    std::erase_if(t, [&](double x) { return x > propagation.duration + 1e-9; });
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  }
  std::vector<double> t;
  std::stringstream ss(output.snapshot_times);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const double x = parse_double("output.snapshot_times", item);
    check_range("output.snapshot_times", x, {0, propagation.duration});
    t.push_back(x);
  }
  std::sort(t.begin(), t.end());
  return t;
}

ProductGrid ScenarioConfig::product_grid() const {
  ProductGrid g;
  if (grid.z_kind == "hermite") {
    g.z1 = Grid1D::hermite(AxisLabel::Z1, grid.n_z, grid.hermite_scale);
    g.z2 = Grid1D::hermite(AxisLabel::Z2, grid.n_z, grid.hermite_scale);
  } else {
    g.z1 = build_equidistant_grid(grid.z_min, grid.z_max, grid.n_z, AxisLabel::Z1);
    g.z2 = build_equidistant_grid(grid.z_min, grid.z_max, grid.n_z, AxisLabel::Z2);
  }
  if (grid.frozen_r) {
    g.frozen_r = initial.r0;
  } else {
    g.r = build_equidistant_grid(grid.r_min, grid.r_max, grid.n_r, AxisLabel::R);
  }
  return g;
}

void ScenarioConfig::validate() const {
  if (!(grid.r_min < grid.r_max)) {
    throw ConfigError("grid.r_min = " + format_double(grid.r_min) + " must be below grid.r_max = " +
                      format_double(grid.r_max));
  }
  if (!grid.frozen_r && !(initial.r0 > grid.r_min && initial.r0 < grid.r_max)) {
    throw ConfigError("initial.r0 = " + format_double(initial.r0) + " is out of range (" + format_double(grid.r_min) +
                      ", " + format_double(grid.r_max) + ")");
  }
  if (pulse.envelope == "narrow" && !(pulse.narrow.start < pulse.narrow.end)) {
    throw ConfigError("pulse.narrow_start must be below pulse.narrow_end");
  }
  if (grid.z_kind == "hermite" && output.write_states) {
    throw ConfigError("output.write_states = true needs grid.z_kind = fourier (snapshots store equidistant grids)");
  }
  if (propagation.detector >= propagation.cap.z_start && propagation.cap.enabled) {
    throw ConfigError("propagation.detector = " + format_double(propagation.detector) +
                      " must lie below cap.z_start = " + format_double(propagation.cap.z_start));
  }
  if (output.dir.empty()) throw ConfigError("output.dir must not be empty");
  physics.validate();
  pulse.pulse().validate();
  initial.spec().validate();
  propagation.validate();
  (void)snapshot_schedule();
}

std::vector<ConfigKey> config_keys() {
  std::vector<ConfigKey> keys;
  for (const auto& h : handlers()) keys.push_back(h.key);
  return keys;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [n, fn] : base_presets()) names.push_back(n);
  for (const auto& [n, fn] : base_presets()) names.push_back(n + "-2d");
  return names;
}

ScenarioConfig preset_config(const std::string& name) {
  ScenarioConfig c;
  apply_preset(c, name);
  return c;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  struct Entry {
    std::string key, value;
    int line;
  };
  std::vector<Entry> entries;
  std::string preset = "none";
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    const std::string name = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string key = section.empty() ? name : section + "." + name;
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": duplicate key " + key + " (first set on line " + std::to_string(it->second) + ")");
    }
    seen[key] = line_no;
    if (key == "preset") {
      preset = value;
      continue;
    }
    entries.push_back({key, value, line_no});
  }

  std::map<std::string, const KeyHandler*> lookup;
  for (const auto& h : handlers()) lookup[h.key.section + "." + h.key.name] = &h;
  std::string unknown;
  for (const auto& e : entries) {
    if (!lookup.count(e.key)) unknown += (unknown.empty() ? "" : ", ") + e.key + " (line " + std::to_string(e.line) + ")";
  }
  if (!unknown.empty()) throw ConfigError(origin + ": unknown keys: " + unknown);

  ScenarioConfig c;
  apply_preset(c, preset);
  for (const auto& e : entries) {
    try {
      lookup[e.key]->set(c, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string dump_config(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "# fully expanded configuration; all quantities in atomic units\n";
  out << "preset = " << config.preset << "\n";
  std::string section;
  for (const auto& h : handlers()) {
    if (h.key.section != section) {
      section = h.key.section;
      out << "\n[" << section << "]\n";
    }
    out << h.key.name << " = " << h.get(config) << "\n";
  }
  return out.str();
}

InitialState prepare_initial_state(const ScenarioConfig& config) {
  const ProductGrid grid = config.product_grid();
  if (!config.initial.state_file.empty()) {
    Wavefunction psi = read_snapshot(config.initial.state_file);
    if (!(psi.shape() == grid.shape())) {
      throw ConfigError("initial.state_file " + config.initial.state_file + " does not match the configured grid");
    }
    Wavefunction placed(grid);
    std::copy(psi.data().begin(), psi.data().end(), placed.data().begin());
    return {std::move(placed), std::nan(""), 0};
  }
  const InitialStateSpec spec = config.initial.spec();
  const PotentialField hamiltonian(spec.relax.hamiltonian, grid, config.physics);
  auto result = relax_imaginary_time(seed_initial(spec, grid), spec, hamiltonian, config.physics);
  if (config.initial.polish_time > 0.0) {
    const PotentialField full(PotentialKind::Full, grid, config.physics);
    result.psi = spectral_filter(result.psi, full, config.physics, config.propagation.dt, config.initial.polish_time);
  }
  return {std::move(result.psi), result.energy, result.steps};
}

InitialState relax_scenario(const ScenarioConfig& config) {
  config.validate();
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  write_text(dir / "config.expanded.ini", dump_config(config));
  InitialState init = prepare_initial_state(config);
  if (config.output.write_states) write_snapshot(init.psi, dir / "initial_state.hhwf");
  const EnergyEvaluator evaluator(init.psi.grid(), config.physics);
  const PotentialField full(PotentialKind::Full, init.psi.grid(), config.physics);
  const auto parts = partition_energies(evaluator.terms(init.psi), config.energy_partition());
  nlohmann::json j{{"status", "ok"},
                   {"relaxation_energy", init.energy},
                   {"full_energy", evaluator.expectation(init.psi, full)},
                   {"E_A", parts.atom_a},
                   {"E_B", parts.atom_b},
                   {"steps", init.relax_steps}};
  write_text(dir / "relax.json", j.dump(2) + "\n");
  return init;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  write_text(dir / "config.expanded.ini", dump_config(config));

  RunSetup setup;
  setup.pulse = config.pulse.pulse();
  setup.params = config.physics;
  setup.settings = config.propagation;
  setup.partition = config.energy_partition();
  setup.snapshot_times = config.snapshot_schedule();

  std::vector<RunSample> earlier;
  ScenarioResult result{InitialState{Wavefunction(config.product_grid()), std::nan(""), 0}, {}};
  if (!config.resume_from.empty()) {
    const fs::path prev = config.resume_from;
    Wavefunction psi = read_snapshot(prev / "final_state.hhwf");
    if (!(psi.shape() == result.initial.psi.shape())) {
      throw ConfigError("resume_from " + prev.string() + " holds a state on a different grid");
    }
    std::copy(psi.data().begin(), psi.data().end(), result.initial.psi.data().begin());
    earlier = read_run_record_csv(prev / "run_record.csv");
    if (earlier.empty()) throw ConfigError("resume_from " + prev.string() + " has an empty run record");
    const RunSample& first = earlier.front();
    const RunSample& last = earlier.back();
    setup.start_time = last.t;
    setup.initial_flux = last.flux;
    setup.reference = Expectations{first.mean.r, first.mean.z1, first.mean.z2};
    setup.initial_densities = std::pair{read_density_csv(prev / "density_e1_t0.csv"),
                                        read_density_csv(prev / "density_e2_t0.csv")};
    std::erase_if(setup.snapshot_times, [&](double t) { return t < last.t + 0.5 * config.propagation.dt; });
    earlier.pop_back();
    result.record.samples = earlier;
  } else {
    result.initial = prepare_initial_state(config);
    if (config.output.write_states) write_snapshot(result.initial.psi, dir / "initial_state.hhwf");
  }
  Wavefunction& psi = result.initial.psi;
  const ProductGrid& grid = psi.grid();

  const auto p1 = setup.initial_densities ? setup.initial_densities->first : electron_density(psi, Electron::E1);
  const auto p2 = setup.initial_densities ? setup.initial_densities->second : electron_density(psi, Electron::E2);
  write_density_csv(grid.z1.nodes(), p1, dir / "density_e1_t0.csv");
  write_density_csv(grid.z2.nodes(), p2, dir / "density_e2_t0.csv");

  const PotentialField potential(PotentialKind::Full, grid, config.physics);
  std::size_t written_snapshots = 0;
  const double span = std::max(config.propagation.duration - setup.start_time, 1e-300);
  double next_report = 0.0;
  Observer progress = [&](const RunSample& s, const Wavefunction&) {
    const double frac = (s.t - setup.start_time) / span;
    if (frac + 1e-12 >= next_report) {
      std::cerr << "t = " << std::fixed << std::setprecision(2) << s.t << " a.u. (" << std::setprecision(0)
                << 100.0 * frac << "%)  norm = " << std::setprecision(8) << s.norm << "  E = " << s.energy
                << std::defaultfloat << "\n";
      next_report += 0.1;
    }
  };
  Observer flush_snapshots = [&](const RunSample&, const Wavefunction&) {
    while (written_snapshots < result.record.densities.size()) {
      write_snapshot_files(result.record, result.record.densities[written_snapshots++], dir);
    }
  };

  try {
    run(psi, potential, setup, result.record, {progress, flush_snapshots});
  } catch (...) {
    write_run_record_csv(result.record, dir / "run_record.csv");
    throw;
  }
  write_run_record_csv(result.record, dir / "run_record.csv");
  while (written_snapshots < result.record.densities.size()) {
    write_snapshot_files(result.record, result.record.densities[written_snapshots++], dir);
  }
  if (config.output.write_states) write_snapshot(psi, dir / "final_state.hhwf");

  const FluxDetectors detectors(grid, config.propagation.detector, config.physics);
  const auto& last = result.record.samples.back();
  const auto totals = total_ionization(last.flux);
  const auto snapped = detectors.snapped_positions();
  const double inside = detectors.norm_inside(psi);
  nlohmann::json summary{{"status", "ok"},
                         {"preset", config.preset},
                         {"initial_energy", std::isnan(result.initial.energy) ? nlohmann::json(nullptr)
                                                                               : nlohmann::json(result.initial.energy)},
                         {"relax_steps", result.initial.relax_steps},
                         {"final_time", last.t},
                         {"final_norm", last.norm},
                         {"norm_inside_detectors", inside},
                         {"flux", flux_json(last.flux)},
                         {"I_A_total", totals.atom_a},
                         {"I_B_total", totals.atom_b},
                         {"bookkeeping", inside + last.flux.sum()},
                         {"detectors_snapped", snapped},
                         {"snapshots", setup.snapshot_times}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return result;
}

std::string error_record(const std::string& kind, const std::string& message, int exit_code) {
  nlohmann::json j{{"status", "error"}, {"kind", kind}, {"message", message}, {"exit_code", exit_code}};
  return j.dump();
}

}  // namespace hhdyn
