#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hhdyn/potentials.hpp"
#include "hhdyn/wavefunction.hpp"

namespace hhdyn {

enum class Electron { E1, E2 };

/// Which exact split of <H_S> into atomic energies is reported.
enum class EnergyPartition {
  DirectProduct,  ///< e1 kinetic energy to A, e2 kinetic energy to B
  Entangled       ///< both electron kinetic energies shared half-half
};

/// P(z_k) = integral over R and the other electron of |psi|^2, on the z_k grid.
std::vector<double> electron_density(const Wavefunction& psi, Electron which);

/// P_now - P_initial; both must come from the same grid.
std::vector<double> probability_difference(const std::vector<double>& now, const std::vector<double>& initial);

struct Expectations {
  double r = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

/// First moments normalized by the current norm^2.
Expectations expectations(const Wavefunction& psi);

/// Each field is <psi|term|psi> / <psi|psi>.
struct EnergyTerms {
  double kinetic_r = 0.0;
  double kinetic_z1 = 0.0;
  double kinetic_z2 = 0.0;
  double proton_proton = 0.0;
  double electron_electron = 0.0;
  double attraction_a = 0.0;  ///< both electrons to the proton at -R/2
  double attraction_b = 0.0;  ///< both electrons to the proton at +R/2

  double total() const {
    return kinetic_r + kinetic_z1 + kinetic_z2 + proton_proton + electron_electron + attraction_a + attraction_b;
  }
};

struct AtomicEnergies {
  double atom_a = 0.0;
  double atom_b = 0.0;
  EnergyPartition partition = EnergyPartition::DirectProduct;
};

AtomicEnergies partition_energies(const EnergyTerms& terms, EnergyPartition partition);

/// Kinetic operators plus separable potential tables for one product grid.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const ProductGrid& grid, const PhysicalParams& params);

  EnergyTerms terms(const Wavefunction& psi) const;
  /// <psi|T + V|psi>/<psi|psi> using a cached potential field (full or reduced).
  double expectation(const Wavefunction& psi, const PotentialField& potential) const;
  /// <psi|T_axis|psi>/<psi|psi>; axis 0 is zero on frozen-nuclei grids.
  double kinetic(const Wavefunction& psi, int axis) const;

  const PhysicalParams& params() const { return params_; }

 private:
  ProductGrid grid_;
  PhysicalParams params_;
  std::vector<std::optional<AxisOperator>> kinetic_;
  mutable ComplexBuffer scratch_;
  std::vector<double> vpp_;   // [ir]
  std::vector<double> vee_;   // [i1 * n2 + i2]
  std::vector<double> a1_, b1_;  // [ir * n1 + i1]
  std::vector<double> a2_, b2_;  // [ir * n2 + i2]
};

AtomicEnergies atomic_energies_direct_product(const Wavefunction& psi, const EnergyEvaluator& evaluator);
AtomicEnergies atomic_energies_entangled(const Wavefunction& psi, const EnergyEvaluator& evaluator);

/// Cumulative outgoing ionization probabilities. Detectors are labeled by side:
/// the -z_d planes count toward atom A and the +z_d planes toward atom B, for either electron.
struct FluxAccumulators {
  double a_e1 = 0.0;  ///< I_A(z1 = -z_d)
  double a_e2 = 0.0;  ///< I_A(z2 = -z_d)
  double b_e1 = 0.0;  ///< I_B(z1 = +z_d)
  double b_e2 = 0.0;  ///< I_B(z2 = +z_d)

  double sum() const { return a_e1 + a_e2 + b_e1 + b_e2; }
};

struct IonizationTotals {
  double atom_a = 0.0;
  double atom_b = 0.0;
};

IonizationTotals total_ionization(const FluxAccumulators& acc);

/// Signed plane-integrated currents (positive = toward +z) at the four planes.
struct PlaneCurrents {
  double e1_neg = 0.0, e1_pos = 0.0, e2_neg = 0.0, e2_pos = 0.0;
};

/// Detector planes snapped to the nearest grid nodes at +-z_d on both electron axes.
class FluxDetectors {
 public:
  FluxDetectors(const ProductGrid& grid, double detector_position, const PhysicalParams& params);

  PlaneCurrents currents(const Wavefunction& psi) const;
  /// Adds dt * outgoing part of each plane current.
  void flux_step(const Wavefunction& psi, FluxAccumulators& acc, double dt) const;

  double requested_position() const { return requested_; }
  /// Snapped plane positions {z1-, z1+, z2-, z2+}.
  std::array<double, 4> snapped_positions() const;
  /// Norm^2 with both electrons strictly between the snapped planes.
  double norm_inside(const Wavefunction& psi) const;

 private:
  struct Plane {
    std::size_t node;
    std::vector<double> derivative;
  };
  double plane_current(const Wavefunction& psi, int axis, const Plane& plane) const;

  double requested_;
  double inv_mass_;
  std::array<Plane, 2> z1_planes_;
  std::array<Plane, 2> z2_planes_;
  std::array<double, 4> snapped_{};
};

/// One row of the run record.
struct RunSample {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
  double energy_a = 0.0;
  double energy_b = 0.0;
  Expectations mean;
  double dz1 = 0.0;
  double dz2 = 0.0;
  FluxAccumulators flux;
  double field_a = 0.0;
  double field_b = 0.0;
};

struct DensitySnapshot {
  double t = 0.0;
  std::vector<double> p1, p2;
  std::vector<double> dp1, dp2;
};

struct RunRecord {
  std::vector<RunSample> samples;
  std::vector<DensitySnapshot> densities;
  std::vector<double> z1_nodes, z2_nodes;
};

/// Column names of the run-record CSV, in order.
const std::vector<std::string>& run_record_columns();

void write_run_record_csv(const RunRecord& record, const std::filesystem::path& path);
void write_density_csv(std::span<const double> z, std::span<const double> p, const std::filesystem::path& path,
                       const std::string& value_column = "P");
/// Second column of a density CSV.
std::vector<double> read_density_csv(const std::filesystem::path& path);
/// Reads the run-record CSV back (used for restarting from a checkpoint).
std::vector<RunSample> read_run_record_csv(const std::filesystem::path& path);

}  // namespace hhdyn
