#pragma once

#include <vector>

#include "hhdyn/errors.hpp"
#include "hhdyn/potentials.hpp"
#include "hhdyn/wavefunction.hpp"

namespace hhdyn {

enum class InitialKind { DirectProduct, EntangledSinglet };

struct ImaginaryTimeSettings {
  double dtau = 0.02;
  double tolerance = 1e-10;  ///< on the per-step change of the energy estimate
  std::size_t max_steps = 200000;
  PotentialKind hamiltonian = PotentialKind::ReducedNoninteracting;
  /// Keep the nuclear factor fixed: skip the R kinetic step and restore each
  /// R slice's seed weight after every step.
  bool freeze_r = true;
};

struct InitialStateSpec {
  InitialKind kind = InitialKind::DirectProduct;
  double r0 = 100.0;
  double sigma_r = 0.5;  ///< Psi_G(R) = exp(-(R - r0)^2 / (2 sigma_r^2))
  double z_a = -50.0;
  double z_b = 50.0;
  ImaginaryTimeSettings relax;

  /// Direct product relaxes with the reduced Hamiltonian, the singlet with the full one.
  static InitialStateSpec defaults_for(InitialKind kind);
  void validate() const;
};

/// Normalized exponential atomic orbitals on z_A, z_B (product or symmetrized sum)
/// times the nuclear Gaussian.
Wavefunction seed_initial(const InitialStateSpec& spec, const ProductGrid& grid);

struct RelaxResult {
  Wavefunction psi;
  double energy = 0.0;  ///< <H> of the relaxation Hamiltonian for the returned state
  std::size_t steps = 0;
  /// -ln(||S psi_n||) / dtau per step; non-increasing for the symmetric step operator S.
  std::vector<double> estimates;
};

class RelaxationError : public NumericalError {
 public:
  RelaxationError(const std::string& what, double last_energy, double residual)
      : NumericalError(what), last_energy(last_energy), residual(residual) {}
  double last_energy;
  double residual;
};

RelaxResult relax_imaginary_time(Wavefunction psi, const InitialStateSpec& spec, const PotentialField& hamiltonian,
                                 const PhysicalParams& params);

/// One softened atom, V = -1/sqrt(z^2 + beta), kinetic prefactor 1/(2 mu).
struct AtomRelaxResult {
  double energy = 0.0;
  std::vector<cplx> psi;
  std::size_t steps = 0;
};

AtomRelaxResult relax_single_atom(const Grid1D& grid, double beta, double reduced_mass, double dtau = 0.02,
                                  double tolerance = 1e-12, std::size_t max_steps = 200000);

/// max |psi(R, z1, z2) - psi(R, z2, z1)|; requires identical z grids.
double exchange_symmetry_defect(const Wavefunction& psi);

}  // namespace hhdyn
