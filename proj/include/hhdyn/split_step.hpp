#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hhdyn/fft.hpp"
#include "hhdyn/laser.hpp"
#include "hhdyn/potentials.hpp"
#include "hhdyn/wavefunction.hpp"

namespace hhdyn {

/// Absorber layout. Ramps are W = strength * ((|x| - start) / width)^order on the
/// electron axes and the same form inward from [r_low_end] and [r_high_start] on R.
struct CapSpec {
  bool enabled = true;
  double z_start = 95.0;
  double z_width = 25.0;
  double z_strength = 0.5;
  int order = 2;
  double r_low_end = 80.0;
  double r_high_start = 120.0;
  double r_width = 5.0;
  double r_strength = 0.5;
};

/// Nonnegative separable absorber W(R, z1, z2) = W_R(R) + W_z(z1) + W_z(z2).
struct CapField {
  std::vector<double> r;
  std::vector<double> z1;
  std::vector<double> z2;

  double at(std::size_t ir, std::size_t i1, std::size_t i2) const { return r[ir] + z1[i1] + z2[i2]; }
};

/// Builds the absorber; rejects layouts that extend past the grid or swallow the detectors.
CapField build_cap(const ProductGrid& grid, const CapSpec& spec, double detector_position);

/// Second-order Strang step exp(-tau V/2) exp(-tau T) exp(-tau V/2), followed by
/// exp(-W dt) when an absorber is attached. tau = i dt advances in real time,
/// a real tau performs one imaginary-time step.
class SplitStepper {
 public:
  SplitStepper(const ProductGrid& grid, const PhysicalParams& params, const PotentialField& potential, cplx tau,
               const CapField* cap = nullptr, bool nuclear_kinetic = true);

  /// `field` is E(t) at the step midpoint; `coupling` may be null when no laser acts.
  void step(Wavefunction& psi, const DipoleCoupling* coupling = nullptr, double field = 0.0) const;

  cplx tau() const { return tau_; }

 private:
  void kick(Wavefunction& psi, const ComplexBuffer& factors, const std::vector<cplx>& l1,
            const std::vector<cplx>& l2) const;
  void kinetic(Wavefunction& psi) const;

  Shape3 shape_;
  cplx tau_;
  ComplexBuffer first_half_;
  ComplexBuffer second_half_;
  std::shared_ptr<SpectralTransform> fft_;
  std::vector<cplx> mult_r_;
  std::vector<cplx> mult_z_;  // [i1 * n2 + i2]
  std::vector<AxisOperator> dense_axes_;
};

}  // namespace hhdyn
