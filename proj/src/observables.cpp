#include "hhdyn/observables.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hhdyn/errors.hpp"

namespace hhdyn {

std::vector<double> electron_density(const Wavefunction& psi, Electron which) {
  const auto& g = psi.grid();
  const Shape3 s = psi.shape();
  const auto data = psi.data();
  std::vector<double> p(which == Electron::E1 ? s.n[1] : s.n[2], 0.0);
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    const double wr = g.r_weight(ir);
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      const cplx* row = data.data() + s.index(ir, i, 0);
      if (which == Electron::E1) {
        double acc = 0.0;
        for (std::size_t j = 0; j < s.n[2]; ++j) acc += std::norm(row[j]) * g.z2.weight(j);
        p[i] += acc * wr;
      } else {
        const double w = wr * g.z1.weight(i);
        for (std::size_t j = 0; j < s.n[2]; ++j) p[j] += std::norm(row[j]) * w;
      }
    }
  }
  return p;
}

std::vector<double> probability_difference(const std::vector<double>& now, const std::vector<double>& initial) {
  if (now.size() != initial.size()) {
    throw ConfigError("probability_difference: grid mismatch (" + std::to_string(now.size()) + " vs " +
                      std::to_string(initial.size()) + " points)");
  }
  std::vector<double> d(now.size());
  for (std::size_t i = 0; i < now.size(); ++i) d[i] = now[i] - initial[i];
  return d;
}

Expectations expectations(const Wavefunction& psi) {
  const auto& g = psi.grid();
  const auto p1 = electron_density(psi, Electron::E1);
  const auto p2 = electron_density(psi, Electron::E2);
  double n2 = 0.0, z1 = 0.0, z2 = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) {
    n2 += g.z1.weight(i) * p1[i];
    z1 += g.z1.weight(i) * p1[i] * g.z1.node(i);
  }
  for (std::size_t j = 0; j < p2.size(); ++j) z2 += g.z2.weight(j) * p2[j] * g.z2.node(j);

  double r = g.frozen_r;
  if (g.r) {
    const Shape3 s = psi.shape();
    double acc = 0.0;
    for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
      double slab = 0.0;
      for (std::size_t i = 0; i < s.n[1]; ++i) {
        const cplx* row = psi.data().data() + s.index(ir, i, 0);
        double line = 0.0;
        for (std::size_t j = 0; j < s.n[2]; ++j) line += std::norm(row[j]) * g.z2.weight(j);
        slab += line * g.z1.weight(i);
      }
      acc += slab * g.r->weight(ir) * g.r->node(ir);
    }
    r = acc / n2;
  }
  return {r, z1 / n2, z2 / n2};
}

AtomicEnergies partition_energies(const EnergyTerms& t, EnergyPartition partition) {
  const double shared = 0.5 * (t.kinetic_r + t.proton_proton + t.electron_electron);
  AtomicEnergies e;
  e.partition = partition;
  if (partition == EnergyPartition::DirectProduct) {
    e.atom_a = shared + t.kinetic_z1 + t.attraction_a;
    e.atom_b = shared + t.kinetic_z2 + t.attraction_b;
  } else {
    const double electrons = 0.5 * (t.kinetic_z1 + t.kinetic_z2);
    e.atom_a = shared + electrons + t.attraction_a;
    e.atom_b = shared + electrons + t.attraction_b;
  }
  return e;
}

EnergyEvaluator::EnergyEvaluator(const ProductGrid& grid, const PhysicalParams& params)
    : grid_(grid), params_(params), scratch_(grid.shape().size()) {
  params_.validate();
  const Shape3 s = grid_.shape();
  const double electron_prefactor = 0.5 / params_.electron_reduced_mass();
  kinetic_.resize(3);
  if (grid_.r) kinetic_[0] = KineticOperator1D(*grid_.r, 1.0 / params_.proton_mass).action_along(s, 0);
  kinetic_[1] = KineticOperator1D(grid_.z1, electron_prefactor).action_along(s, 1);
  kinetic_[2] = KineticOperator1D(grid_.z2, electron_prefactor).action_along(s, 2);

  const std::size_t nr = s.n[0], n1 = s.n[1], n2 = s.n[2];
  vpp_.resize(nr);
  a1_.resize(nr * n1);
  b1_.resize(nr * n1);
  a2_.resize(nr * n2);
  b2_.resize(nr * n2);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    const double r = grid_.r_node(ir);
    vpp_[ir] = v_pp(r);
    for (std::size_t i = 0; i < n1; ++i) {
      a1_[ir * n1 + i] = proton_attraction(grid_.z1.node(i), -0.5 * r, params_.beta);
      b1_[ir * n1 + i] = proton_attraction(grid_.z1.node(i), 0.5 * r, params_.beta);
    }
    for (std::size_t j = 0; j < n2; ++j) {
      a2_[ir * n2 + j] = proton_attraction(grid_.z2.node(j), -0.5 * r, params_.beta);
      b2_[ir * n2 + j] = proton_attraction(grid_.z2.node(j), 0.5 * r, params_.beta);
    }
  }
  vee_.resize(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n2; ++j) vee_[i * n2 + j] = v_ee(grid_.z1.node(i), grid_.z2.node(j), params_.alpha);
}

double EnergyEvaluator::kinetic(const Wavefunction& psi, int axis) const {
  if (!kinetic_[axis]) return 0.0;
  const auto src = psi.data();
  std::copy(src.begin(), src.end(), scratch_.begin());
  kinetic_[axis]->apply(scratch_);
  const Shape3 s = psi.shape();
  double total = 0.0;
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    double slab = 0.0;
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      const std::size_t base = s.index(ir, i, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < s.n[2]; ++j)
        acc += (std::conj(src[base + j]) * scratch_[base + j]).real() * grid_.z2.weight(j);
      slab += acc * grid_.z1.weight(i);
    }
    total += slab * grid_.r_weight(ir);
  }
  return total / psi.norm_squared();
}

EnergyTerms EnergyEvaluator::terms(const Wavefunction& psi) const {
  const Shape3 s = psi.shape();
  const std::size_t nr = s.n[0], n1 = s.n[1], n2 = s.n[2];
  std::vector<double> m1(nr * n1, 0.0), m2(nr * n2, 0.0), pair(n1 * n2, 0.0);
  const auto data = psi.data();
  for (std::size_t ir = 0; ir < nr; ++ir) {
    const double wr = grid_.r_weight(ir);
    for (std::size_t i = 0; i < n1; ++i) {
      const cplx* row = data.data() + s.index(ir, i, 0);
      const double w1 = grid_.z1.weight(i);
      double line = 0.0;
      for (std::size_t j = 0; j < n2; ++j) {
        const double p = std::norm(row[j]);
        line += p * grid_.z2.weight(j);
        m2[ir * n2 + j] += p * w1;
        pair[i * n2 + j] += p * wr;
      }
      m1[ir * n1 + i] = line;
    }
  }

  EnergyTerms t;
  double norm2 = 0.0;
  for (std::size_t ir = 0; ir < nr; ++ir) {
    const double wr = grid_.r_weight(ir);
    double slab = 0.0, att_a = 0.0, att_b = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
      const double w = grid_.z1.weight(i) * m1[ir * n1 + i];
      slab += w;
      att_a += w * a1_[ir * n1 + i];
      att_b += w * b1_[ir * n1 + i];
    }
    for (std::size_t j = 0; j < n2; ++j) {
      const double w = grid_.z2.weight(j) * m2[ir * n2 + j];
      att_a += w * a2_[ir * n2 + j];
      att_b += w * b2_[ir * n2 + j];
    }
    norm2 += wr * slab;
    t.proton_proton += wr * slab * vpp_[ir];
    t.attraction_a += wr * att_a;
    t.attraction_b += wr * att_b;
  }
  for (std::size_t i = 0; i < n1; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n2; ++j) acc += grid_.z2.weight(j) * pair[i * n2 + j] * vee_[i * n2 + j];
    t.electron_electron += grid_.z1.weight(i) * acc;
  }
  t.proton_proton /= norm2;
  t.attraction_a /= norm2;
  t.attraction_b /= norm2;
  t.electron_electron /= norm2;
  t.kinetic_r = kinetic(psi, 0);
  t.kinetic_z1 = kinetic(psi, 1);
  t.kinetic_z2 = kinetic(psi, 2);
  return t;
}

double EnergyEvaluator::expectation(const Wavefunction& psi, const PotentialField& potential) const {
  if (!(potential.shape() == psi.shape())) throw ConfigError("potential and wavefunction grids differ");
  const Shape3 s = psi.shape();
  const auto data = psi.data();
  const auto v = potential.values();
  double total = 0.0;
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    double slab = 0.0;
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      const std::size_t base = s.index(ir, i, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < s.n[2]; ++j) acc += std::norm(data[base + j]) * v[base + j] * grid_.z2.weight(j);
      slab += acc * grid_.z1.weight(i);
    }
    total += slab * grid_.r_weight(ir);
  }
  return total / psi.norm_squared() + kinetic(psi, 0) + kinetic(psi, 1) + kinetic(psi, 2);
}

AtomicEnergies atomic_energies_direct_product(const Wavefunction& psi, const EnergyEvaluator& evaluator) {
  return partition_energies(evaluator.terms(psi), EnergyPartition::DirectProduct);
}

AtomicEnergies atomic_energies_entangled(const Wavefunction& psi, const EnergyEvaluator& evaluator) {
  return partition_energies(evaluator.terms(psi), EnergyPartition::Entangled);
}

IonizationTotals total_ionization(const FluxAccumulators& acc) {
  return {acc.a_e1 + acc.a_e2, acc.b_e1 + acc.b_e2};
}

FluxDetectors::FluxDetectors(const ProductGrid& grid, double detector_position, const PhysicalParams& params)
    : requested_(detector_position), inv_mass_(1.0 / params.electron_reduced_mass()) {
  auto make = [&](const Grid1D& g, double z, double& snapped) {
    if (!(z > g.min() && z < g.max())) {
      throw ConfigError("flux detector at " + std::to_string(z) + " lies outside the " + to_string(g.label()) +
                        " grid");
    }
    const std::size_t node = g.nearest_index(z);
    snapped = g.node(node);
    return Plane{node, first_derivative_row(g, node)};
  };
  if (!(detector_position > 0.0)) throw ConfigError("flux detector position must be positive");
  z1_planes_ = {make(grid.z1, -detector_position, snapped_[0]), make(grid.z1, detector_position, snapped_[1])};
  z2_planes_ = {make(grid.z2, -detector_position, snapped_[2]), make(grid.z2, detector_position, snapped_[3])};
}

std::array<double, 4> FluxDetectors::snapped_positions() const { return snapped_; }

double FluxDetectors::plane_current(const Wavefunction& psi, int axis, const Plane& plane) const {
  const auto& g = psi.grid();
  const Shape3 s = psi.shape();
  const cplx* data = psi.data().data();
  double total = 0.0;
  if (axis == 1) {
    std::vector<cplx> deriv(s.n[2]);
    for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
      std::fill(deriv.begin(), deriv.end(), cplx{0.0, 0.0});
      for (std::size_t k = 0; k < s.n[1]; ++k) {
        const double d = plane.derivative[k];
        const cplx* row = data + s.index(ir, k, 0);
        for (std::size_t j = 0; j < s.n[2]; ++j) deriv[j] += d * row[j];
      }
      const cplx* at_plane = data + s.index(ir, plane.node, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < s.n[2]; ++j) acc += (std::conj(at_plane[j]) * deriv[j]).imag() * g.z2.weight(j);
      total += acc * g.r_weight(ir);
    }
  } else {
    for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
      double slab = 0.0;
      for (std::size_t i = 0; i < s.n[1]; ++i) {
        const cplx* row = data + s.index(ir, i, 0);
        cplx d{0.0, 0.0};
        for (std::size_t k = 0; k < s.n[2]; ++k) d += plane.derivative[k] * row[k];
        slab += (std::conj(row[plane.node]) * d).imag() * g.z1.weight(i);
      }
      total += slab * g.r_weight(ir);
    }
  }
  return inv_mass_ * total;
}

PlaneCurrents FluxDetectors::currents(const Wavefunction& psi) const {
  return {plane_current(psi, 1, z1_planes_[0]), plane_current(psi, 1, z1_planes_[1]),
          plane_current(psi, 2, z2_planes_[0]), plane_current(psi, 2, z2_planes_[1])};
}

void FluxDetectors::flux_step(const Wavefunction& psi, FluxAccumulators& acc, double dt) const {
  const auto j = currents(psi);
  acc.a_e1 += dt * std::max(0.0, -j.e1_neg);
  acc.b_e1 += dt * std::max(0.0, j.e1_pos);
  acc.a_e2 += dt * std::max(0.0, -j.e2_neg);
  acc.b_e2 += dt * std::max(0.0, j.e2_pos);
}

double FluxDetectors::norm_inside(const Wavefunction& psi) const {
  const auto& g = psi.grid();
  const Shape3 s = psi.shape();
  auto factor = [](std::size_t i, std::size_t lo, std::size_t hi) {
    if (i < lo || i > hi) return 0.0;
    return (i == lo || i == hi) ? 0.5 : 1.0;
  };
  double total = 0.0;
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    double slab = 0.0;
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      const double f1 = factor(i, z1_planes_[0].node, z1_planes_[1].node);
      if (f1 == 0.0) continue;
      const cplx* row = psi.data().data() + s.index(ir, i, 0);
      double acc = 0.0;
      for (std::size_t j = z2_planes_[0].node; j <= z2_planes_[1].node; ++j)
        acc += factor(j, z2_planes_[0].node, z2_planes_[1].node) * std::norm(row[j]) * g.z2.weight(j);
      slab += f1 * acc * g.z1.weight(i);
    }
    total += slab * g.r_weight(ir);
  }
  return total;
}

const std::vector<std::string>& run_record_columns() {
  static const std::vector<std::string> cols{"t_au",    "norm",    "E_total", "E_A",     "E_B",    "R_mean",
                                             "z1_mean", "z2_mean", "dz1",     "dz2",     "I_A_e1", "I_A_e2",
                                             "I_B_e1",  "I_B_e2",  "field_A", "field_B"};
  return cols;
}

void write_run_record_csv(const RunRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open " + path.string() + " for writing");
  const auto& cols = run_record_columns();
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << '\n' << std::setprecision(17);
  for (const auto& r : record.samples) {
    out << r.t << ',' << r.norm << ',' << r.energy << ',' << r.energy_a << ',' << r.energy_b << ',' << r.mean.r << ','
        << r.mean.z1 << ',' << r.mean.z2 << ',' << r.dz1 << ',' << r.dz2 << ',' << r.flux.a_e1 << ','
        << r.flux.a_e2 << ',' << r.flux.b_e1 << ',' << r.flux.b_e2 << ',' << r.field_a << ',' << r.field_b
        << '\n';
  }
  if (!out) throw NumericalError("write to " + path.string() + " failed");
}

void write_density_csv(std::span<const double> z, std::span<const double> p, const std::filesystem::path& path,
                       const std::string& value_column) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open " + path.string() + " for writing");
  out << "z," << value_column << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < z.size(); ++i) out << z[i] << ',' << p[i] << '\n';
  if (!out) throw NumericalError("write to " + path.string() + " failed");
}

std::vector<double> read_density_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open density file " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("malformed density row in " + path.string());
    p.push_back(std::stod(line.substr(comma + 1)));
  }
  return p;
}

std::vector<RunSample> read_run_record_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run record " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<RunSample> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != run_record_columns().size()) throw ConfigError("malformed run record row in " + path.string());
    RunSample r;
    r.t = v[0];
    r.norm = v[1];
    r.energy = v[2];
    r.energy_a = v[3];
    r.energy_b = v[4];
    r.mean = {v[5], v[6], v[7]};
    r.dz1 = v[8];
    r.dz2 = v[9];
    r.flux = {v[10], v[11], v[12], v[13]};
    r.field_a = v[14];
    r.field_b = v[15];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hhdyn
