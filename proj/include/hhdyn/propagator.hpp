#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hhdyn/laser.hpp"
#include "hhdyn/observables.hpp"
#include "hhdyn/split_step.hpp"

namespace hhdyn {

struct PropagationSettings {
  double dt = 0.021;
  double duration = fs_to_au(20.0);  ///< end time of the run (a.u.)
  std::size_t output_stride = 10;
  double detector = 91.0;
  CapSpec cap;

  void validate() const;
};

/// Real-time evolution under H_S + H_SF(t) with absorbing boundaries.
class Propagator {
 public:
  Propagator(const ProductGrid& grid, const PhysicalParams& params, const PotentialField& potential,
             const LaserPulse& pulse, const PropagationSettings& settings);

  /// Advances psi from t to t + dt; the laser term is evaluated at t + dt/2.
  /// Throws NumericalError naming `step_index` if the result is not finite.
  void step(Wavefunction& psi, double t, std::size_t step_index = 0) const;

  const FluxDetectors& detectors() const { return detectors_; }
  const CapField& cap() const { return cap_; }
  const LaserPulse& pulse() const { return pulse_; }

 private:
  LaserPulse pulse_;
  PropagationSettings settings_;
  CapField cap_;
  DipoleCoupling coupling_;
  SplitStepper stepper_;
  FluxDetectors detectors_;
};

/// Hann-windowed time average of exp(i E t) U(t) psi over `window` a.u. of
/// field-free evolution, with E the eigenphase of psi under one step. Removes
/// the small off-resonant content that an imaginary-time fixed point carries
/// into the real-time step. Returns a normalized state.
Wavefunction spectral_filter(const Wavefunction& psi, const PotentialField& potential, const PhysicalParams& params,
                             double dt, double window);

struct RunSetup {
  LaserPulse pulse;
  PhysicalParams params;
  PropagationSettings settings;
  EnergyPartition partition = EnergyPartition::DirectProduct;
  std::vector<double> snapshot_times;
  /// Continuation of an earlier run: start time, accumulated fluxes, and the
  /// t = 0 references for the deviations and probability differences.
  double start_time = 0.0;
  FluxAccumulators initial_flux;
  std::optional<Expectations> reference;
  std::optional<std::pair<std::vector<double>, std::vector<double>>> initial_densities;
};

using Observer = std::function<void(const RunSample&, const Wavefunction&)>;

/// Propagates to settings.duration, appending to `record` as it goes so that a
/// partial record survives an exception.
void run(Wavefunction& psi, const PotentialField& potential, const RunSetup& setup, RunRecord& record,
         const std::vector<Observer>& observers = {});

RunRecord run(Wavefunction& psi, const PotentialField& potential, const RunSetup& setup,
              const std::vector<Observer>& observers = {});

}  // namespace hhdyn
