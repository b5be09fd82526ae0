#include "hhdyn/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hhdyn/errors.hpp"

namespace hhdyn {

void PropagationSettings::validate() const {
  if (!(dt > 0.0)) throw ConfigError("propagation.dt must be positive");
  if (!(duration >= 0.0)) throw ConfigError("propagation.duration must be >= 0");
  if (output_stride == 0) throw ConfigError("propagation.output_stride must be >= 1");
  if (!(detector > 0.0)) throw ConfigError("propagation.detector must be positive");
}

Propagator::Propagator(const ProductGrid& grid, const PhysicalParams& params, const PotentialField& potential,
                       const LaserPulse& pulse, const PropagationSettings& settings)
    : pulse_(pulse),
      settings_(settings),
      cap_(build_cap(grid, settings.cap, settings.detector)),
      coupling_(dipole_coupling(pulse, grid, params)),
      stepper_(grid, params, potential, cplx{0.0, settings.dt}, settings.cap.enabled ? &cap_ : nullptr, true),
      detectors_(grid, settings.detector, params) {
  settings_.validate();
  pulse_.validate();
}

void Propagator::step(Wavefunction& psi, double t, std::size_t step_index) const {
  const double field = electric_field(pulse_, t + 0.5 * settings_.dt);
  stepper_.step(psi, &coupling_, field);
  if (!std::isfinite(psi.norm_squared())) {
    throw NumericalError("non-finite wavefunction after step " + std::to_string(step_index) +
                         " (t = " + std::to_string(t + settings_.dt) + " a.u.)");
  }
}

void run(Wavefunction& psi, const PotentialField& potential, const RunSetup& setup, RunRecord& record,
         const std::vector<Observer>& observers) {
  const auto& s = setup.settings;
  const auto& grid = psi.grid();
  const Propagator prop(grid, setup.params, potential, setup.pulse, s);
  const EnergyEvaluator evaluator(grid, setup.params);
  const auto amps = effective_amplitudes(setup.pulse);
  const double env_a = setup.pulse.amplitude != 0.0 ? amps.atom_a / setup.pulse.amplitude : 0.0;
  const double env_b = setup.pulse.amplitude != 0.0 ? amps.atom_b / setup.pulse.amplitude : 0.0;

  const Expectations reference = setup.reference ? *setup.reference : expectations(psi);
  const auto initial = setup.initial_densities
                           ? *setup.initial_densities
                           : std::pair{electron_density(psi, Electron::E1), electron_density(psi, Electron::E2)};
  record.z1_nodes.assign(grid.z1.nodes().begin(), grid.z1.nodes().end());
  record.z2_nodes.assign(grid.z2.nodes().begin(), grid.z2.nodes().end());

  FluxAccumulators flux = setup.initial_flux;
  auto sample = [&](double t) {
    RunSample r;
    r.t = t;
    r.norm = psi.norm();
    const auto terms = evaluator.terms(psi);
    const auto parts = partition_energies(terms, setup.partition);
    r.energy = terms.total();
    r.energy_a = parts.atom_a;
    r.energy_b = parts.atom_b;
    r.mean = expectations(psi);
    r.dz1 = r.mean.z1 - reference.z1;
    r.dz2 = r.mean.z2 - reference.z2;
    r.flux = flux;
    const double e = electric_field(setup.pulse, t);
    r.field_a = env_a * e;
    r.field_b = env_b * e;
    record.samples.push_back(r);
    for (const auto& obs : observers) obs(r, psi);
  };

  std::vector<double> pending = setup.snapshot_times;
  std::sort(pending.begin(), pending.end());
  auto snapshots = [&](double t) {
    while (!pending.empty() && t >= pending.front() - 0.5 * s.dt) {
      DensitySnapshot d;
      d.t = t;
      d.p1 = electron_density(psi, Electron::E1);
      d.p2 = electron_density(psi, Electron::E2);
      d.dp1 = probability_difference(d.p1, initial.first);
      d.dp2 = probability_difference(d.p2, initial.second);
      record.densities.push_back(std::move(d));
      pending.erase(pending.begin());
    }
  };

  const double remaining = std::max(0.0, s.duration - setup.start_time);
  const auto n_steps = static_cast<std::size_t>(std::llround(remaining / s.dt));
  // rows stay on the global stride so a resumed run lines up with an uninterrupted one
  const auto offset = static_cast<std::size_t>(std::llround(setup.start_time / s.dt));
  double t = setup.start_time;
  sample(t);
  snapshots(t);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    prop.step(psi, t, n);
    t = setup.start_time + static_cast<double>(n) * s.dt;
    prop.detectors().flux_step(psi, flux, s.dt);
    if ((offset + n) % s.output_stride == 0 || n == n_steps) sample(t);
    snapshots(t);
  }
}

RunRecord run(Wavefunction& psi, const PotentialField& potential, const RunSetup& setup,
              const std::vector<Observer>& observers) {
  RunRecord record;
  run(psi, potential, setup, record, observers);
  return record;
}

Wavefunction spectral_filter(const Wavefunction& psi, const PotentialField& potential, const PhysicalParams& params,
                             double dt, double window) {
  if (!(dt > 0.0) || !(window >= 0.0)) throw ConfigError("spectral filter needs dt > 0 and window >= 0");
  const std::size_t n = static_cast<std::size_t>(std::llround(window / dt));
  if (n < 2) return psi;
  const SplitStepper stepper(psi.grid(), params, potential, cplx{0.0, dt});
  Wavefunction current = psi;
  stepper.step(current);
  const double phase = std::arg(psi.inner(current));  // -E dt
  Wavefunction acc(psi.grid());
  auto a = acc.data();
  for (std::size_t k = 1; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    const cplx w = std::polar(s * s, -phase * static_cast<double>(k));
    const auto b = current.data();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += w * b[i];
    stepper.step(current);
  }
  if (!acc.all_finite()) throw NumericalError("spectral filter produced a non-finite state");
  acc.normalize();
  return acc;
}

}  // namespace hhdyn
