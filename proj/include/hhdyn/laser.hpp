#pragma once

#include <variant>
#include <vector>

#include "hhdyn/grids.hpp"
#include "hhdyn/potentials.hpp"

namespace hhdyn {

/// Atomic units of time per femtosecond.
inline constexpr double kAuTimePerFs = 41.341373336;
/// W/cm^2 per squared field amplitude in a.u. (display only).
inline constexpr double kIntensityPerAu2 = 3.509e16;
/// Atom centers used for the effective amplitudes.
inline constexpr double kAtomACenter = -50.0;
inline constexpr double kAtomBCenter = 50.0;

inline constexpr double fs_to_au(double fs) { return fs * kAuTimePerFs; }
inline constexpr double au_to_fs(double au) { return au / kAuTimePerFs; }

struct GaussianEnvelope {
  double width = 861.0;     ///< lambda (a.u.)
  double center = -1291.5;  ///< z0 (a.u.)
};
struct NarrowEnvelope {
  double start = -60.0;  ///< z_a
  double end = -40.0;    ///< z_b
};
struct UniformEnvelope {};
struct NoEnvelope {};

using SpatialEnvelope = std::variant<NoEnvelope, UniformEnvelope, GaussianEnvelope, NarrowEnvelope>;

struct LaserPulse {
  double amplitude = 0.0;          ///< E0
  double frequency = 1.0;          ///< omega
  double duration = fs_to_au(5.0); ///< t_p at the base
  double cep = 0.0;                ///< phi
  SpatialEnvelope envelope = NoEnvelope{};
  bool drive_e1 = true;
  bool drive_e2 = true;

  void validate() const;
  /// omega t_p / 2 pi
  double cycle_count() const;
};

/// A(t)/c = (E0/omega) sin^2(pi t/t_p) cos(omega t + phi) on [0, t_p], zero outside.
double vector_potential_over_c(const LaserPulse& pulse, double t);

/// E(t) = -(1/c) dA/dt including the switching term; zero outside [0, t_p].
double electric_field(const LaserPulse& pulse, double t);

/// F(z) in [0, 1].
double spatial_envelope(const LaserPulse& pulse, double z);

struct EffectiveAmplitudes {
  double atom_a = 0.0;
  double atom_b = 0.0;
};

/// (E0 F(z_A), E0 F(z_B)) with z_A = -50, z_B = +50.
EffectiveAmplitudes effective_amplitudes(const LaserPulse& pulse);

/// Static coupling shapes c_k(z) = (1 + gamma) m_k F(z) z, so that the
/// interaction energy is E(t) [c_1(z1) + c_2(z2)].
struct DipoleCoupling {
  std::vector<double> e1;
  std::vector<double> e2;
};

DipoleCoupling dipole_coupling(const LaserPulse& pulse, const ProductGrid& grid, const PhysicalParams& params);

/// H_SF(t) on the (z1, z2) plane, z2 fastest. Independent of R.
std::vector<double> interaction_potential(const LaserPulse& pulse, double t, const ProductGrid& grid,
                                          const PhysicalParams& params);

inline double intensity_w_cm2(double amplitude) { return amplitude * amplitude * kIntensityPerAu2; }

}  // namespace hhdyn
