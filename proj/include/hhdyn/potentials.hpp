#pragma once

#include <span>
#include <vector>

#include "hhdyn/grids.hpp"

namespace hhdyn {

/// Masses and softening constants, atomic units.
struct PhysicalParams {
  double proton_mass = 1836.15267343;
  double alpha = 1.0e-4;  ///< electron-electron softening (a.u.^2)
  double beta = 1.995;    ///< electron-proton softening (a.u.^2)

  /// mu_e = 2 m_p / (2 m_p + 1)
  double electron_reduced_mass() const { return 2.0 * proton_mass / (2.0 * proton_mass + 1.0); }
  /// gamma = 1 / (1 + 2 m_p)
  double dipole_correction() const { return 1.0 / (1.0 + 2.0 * proton_mass); }

  void validate() const;
};

double v_pp(double r);
double v_ee(double z1, double z2, double alpha);
/// Two-center softened attraction of one electron to both protons at -R/2 and +R/2.
double v_ep(double z, double r, double beta);
/// Attraction of an electron at z to a single proton at `center`.
double proton_attraction(double z, double center, double beta);

enum class PotentialKind {
  Full,                  ///< V_pp + V_ep(z1) + V_ep(z2) + V_ee
  ReducedNoninteracting  ///< e1 sees only the proton at -R/2, e2 only the one at +R/2
};

/// Static system potential cached on the product grid, R slowest and z2 fastest.
class PotentialField {
 public:
  PotentialField(PotentialKind kind, const ProductGrid& grid, const PhysicalParams& params);
  /// Arbitrary tabulated potential (free-particle and model tests).
  PotentialField(Shape3 shape, std::vector<double> values);

  PotentialKind kind() const { return kind_; }
  Shape3 shape() const { return shape_; }
  std::span<const double> values() const { return values_; }
  double at(std::size_t ir, std::size_t i1, std::size_t i2) const { return values_[shape_.index(ir, i1, i2)]; }

 private:
  PotentialKind kind_;
  Shape3 shape_;
  std::vector<double> values_;
};

PotentialField assemble_potential(PotentialKind kind, const ProductGrid& grid, const PhysicalParams& params);

}  // namespace hhdyn
