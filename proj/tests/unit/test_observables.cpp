#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "hhdyn/errors.hpp"
#include "hhdyn/observables.hpp"
#include "hhdyn/state.hpp"

using namespace hhdyn;

namespace {

ProductGrid small3d() {
  ProductGrid g;
  g.r = build_equidistant_grid(95, 105, 8, AxisLabel::R);
  g.z1 = build_equidistant_grid(-100, 100, 48, AxisLabel::Z1);
  g.z2 = build_equidistant_grid(-100, 100, 48, AxisLabel::Z2);
  return g;
}

// Random smooth-ish state: a few random complex gaussians.
Wavefunction random_state(const ProductGrid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Wavefunction psi(g);
  const Shape3 s = psi.shape();
  for (int blob = 0; blob < 3; ++blob) {
    const cplx c{u(rng), u(rng)};
    const double r0 = 100 + 3 * u(rng), a = 70 * u(rng), b = 70 * u(rng), k1 = u(rng), k2 = u(rng);
    for (std::size_t ir = 0; ir < s.n[0]; ++ir)
      for (std::size_t i = 0; i < s.n[1]; ++i)
        for (std::size_t j = 0; j < s.n[2]; ++j) {
          const double x = g.z1.node(i) - a, y = g.z2.node(j) - b, r = g.r_node(ir) - r0;
          psi.at(ir, i, j) += c * std::exp(-x * x / 200 - y * y / 200 - r * r / 8) *
                              std::exp(cplx{0, k1 * x + k2 * y});
        }
  }
  psi.normalize();
  return psi;
}

// <H> assembled line by line, independent of the evaluator's batched operators.
double direct_energy(const Wavefunction& psi, const PhysicalParams& params) {
  const auto& g = psi.grid();
  const Shape3 s = psi.shape();
  auto full = assemble_potential(PotentialKind::Full, g, params);
  std::vector<cplx> hpsi(s.size(), 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) hpsi[k] = full.values()[k] * psi.data()[k];
  const double pe = 0.5 / params.electron_reduced_mass();
  auto line_apply = [&](const KineticOperator1D& op, int axis) {
    const std::size_t n = s.n[axis];
    std::vector<cplx> in(n), out(n);
    for (std::size_t a = 0; a < s.n[(axis + 1) % 3]; ++a)
      for (std::size_t b = 0; b < s.n[(axis + 2) % 3]; ++b) {
        std::array<std::size_t, 3> idx{};
        idx[(axis + 1) % 3] = a;
        idx[(axis + 2) % 3] = b;
        for (std::size_t m = 0; m < n; ++m) {
          idx[axis] = m;
          in[m] = psi.at(idx[0], idx[1], idx[2]);
        }
        op.apply(in, out);
        for (std::size_t m = 0; m < n; ++m) {
          idx[axis] = m;
          hpsi[s.index(idx[0], idx[1], idx[2])] += out[m];
        }
      }
  };
  if (g.r) line_apply(KineticOperator1D(*g.r, 1.0 / params.proton_mass), 0);
  line_apply(KineticOperator1D(g.z1, pe), 1);
  line_apply(KineticOperator1D(g.z2, pe), 2);
  double e = 0;
  for (std::size_t ir = 0; ir < s.n[0]; ++ir)
    for (std::size_t i = 0; i < s.n[1]; ++i)
      for (std::size_t j = 0; j < s.n[2]; ++j)
        e += (std::conj(psi.at(ir, i, j)) * hpsi[s.index(ir, i, j)]).real() * g.r_weight(ir) * g.z1.weight(i) *
             g.z2.weight(j);
  return e / psi.norm_squared();
}

Wavefunction reflected(const Wavefunction& psi, bool exchange) {
  Wavefunction out(psi.grid());
  const Shape3 s = psi.shape();
  for (std::size_t ir = 0; ir < s.n[0]; ++ir)
    for (std::size_t i = 0; i < s.n[1]; ++i)
      for (std::size_t j = 0; j < s.n[2]; ++j) {
        const std::size_t a = s.n[1] - 1 - i, b = s.n[2] - 1 - j;
        out.at(ir, i, j) = exchange ? psi.at(ir, b, a) : psi.at(ir, a, b);
      }
  return out;
}

}  // namespace

TEST_CASE("both partitions add up to the total energy") {
  PhysicalParams params;
  auto g = small3d();
  EnergyEvaluator evaluator(g, params);
  auto full = assemble_potential(PotentialKind::Full, g, params);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto psi = random_state(g, rng);
    const double h = direct_energy(psi, params);
    auto dp = atomic_energies_direct_product(psi, evaluator);
    auto en = atomic_energies_entangled(psi, evaluator);
    CHECK(std::abs(dp.atom_a + dp.atom_b - h) <= 1e-9);
    CHECK(std::abs(en.atom_a + en.atom_b - h) <= 1e-9);
    CHECK(std::abs(evaluator.expectation(psi, full) - h) <= 1e-9);
  }
}

TEST_CASE("reflection swaps the atomic energies") {
  PhysicalParams params;
  auto g = small3d();
  EnergyEvaluator evaluator(g, params);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    auto psi = random_state(g, rng);
    auto en = atomic_energies_entangled(psi, evaluator);
    auto en_r = atomic_energies_entangled(reflected(psi, false), evaluator);
    CHECK(en_r.atom_a == doctest::Approx(en.atom_b).epsilon(1e-10));
    CHECK(en_r.atom_b == doctest::Approx(en.atom_a).epsilon(1e-10));
    auto dp = atomic_energies_direct_product(psi, evaluator);
    auto dp_r = atomic_energies_direct_product(reflected(psi, true), evaluator);
    CHECK(dp_r.atom_a == doctest::Approx(dp.atom_b).epsilon(1e-10));
    CHECK(dp_r.atom_b == doctest::Approx(dp.atom_a).epsilon(1e-10));
  }
}

TEST_CASE("reflection swaps the detector roles") {
  PhysicalParams params;
  ProductGrid g;
  g.z1 = build_equidistant_grid(-120, 120, 128, AxisLabel::Z1);
  g.z2 = build_equidistant_grid(-120, 120, 128, AxisLabel::Z2);
  Wavefunction psi(g);
  for (std::size_t i = 0; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j) {
      const double x = g.z1.node(i) - 80, y = g.z2.node(j) + 85;
      psi.at(0, i, j) = std::exp(-(x * x + y * y) / 50) * std::exp(cplx{0, 0.8 * x - 0.6 * y});
    }
  FluxDetectors det(g, 91, params);
  FluxAccumulators acc, acc_r;
  det.flux_step(psi, acc, 1.0);
  det.flux_step(reflected(psi, false), acc_r, 1.0);
  CHECK(acc.b_e1 > 0);
  CHECK(acc.a_e2 > 0);
  CHECK(acc_r.a_e1 == doctest::Approx(acc.b_e1).epsilon(1e-10));
  CHECK(acc_r.b_e2 == doctest::Approx(acc.a_e2).epsilon(1e-10));
  CHECK(acc_r.b_e1 == doctest::Approx(acc.a_e1).epsilon(1e-10).scale(1e-20));
}

TEST_CASE("densities") {
  auto g = small3d();
  std::mt19937_64 rng(9);
  auto psi = random_state(g, rng);
  for (auto& a : psi.data()) a *= 0.9;
  auto p1 = electron_density(psi, Electron::E1);
  // opposite integration order: R innermost
  const Shape3 s = psi.shape();
  for (std::size_t i = 0; i < s.n[1]; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < s.n[2]; ++j) {
      double r_sum = 0;
      for (std::size_t ir = 0; ir < s.n[0]; ++ir) r_sum += std::norm(psi.at(ir, i, j)) * g.r_weight(ir);
      acc += r_sum * g.z2.weight(j);
    }
    CHECK(std::abs(acc - p1[i]) <= 1e-12 * std::max(1.0, std::abs(acc)));
    CHECK(p1[i] >= 0.0);
  }
  auto seed = seed_initial(InitialStateSpec::defaults_for(InitialKind::DirectProduct), small3d());
  auto p0 = electron_density(seed, Electron::E1);
  double total = 0;
  for (std::size_t i = 0; i < p0.size(); ++i) total += p0[i] * g.z1.weight(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  auto dp = probability_difference(p1, p0);
  double integral = 0;
  for (std::size_t i = 0; i < dp.size(); ++i) integral += dp[i] * g.z1.weight(i);
  CHECK(std::abs(integral - (psi.norm_squared() - 1.0)) <= 1e-9);
  auto zero = probability_difference(p0, p0);
  for (double v : zero) CHECK(v == 0.0);
  CHECK_THROWS_AS(probability_difference(p0, std::vector<double>(3)), ConfigError);
}

TEST_CASE("entangled seed splits energy evenly") {
  PhysicalParams params;
  auto g = small3d();
  auto psi = seed_initial(InitialStateSpec::defaults_for(InitialKind::EntangledSinglet), g);
  EnergyEvaluator evaluator(g, params);
  auto e = atomic_energies_entangled(psi, evaluator);
  CHECK(std::abs(e.atom_a - e.atom_b) <= 1e-9);
}

TEST_CASE("ionization totals") {
  CHECK(total_ionization(FluxAccumulators{}).atom_a == 0.0);
  auto t = total_ionization(FluxAccumulators{0.1, 0.2, 0.3, 0.4});
  CHECK(t.atom_a == 0.1 + 0.2);
  CHECK(t.atom_b == 0.3 + 0.4);
}

TEST_CASE("run record csv round trip") {
  RunRecord rec;
  for (int k = 0; k < 3; ++k) {
    RunSample s;
    s.t = 0.21 * k;
    s.norm = 1 - 1e-9 * k;
    s.energy = -1.0 / 3;
    s.flux.b_e2 = 1e-17 * k;
    s.field_a = 0.125 * k;
    rec.samples.push_back(s);
  }
  const auto path = std::filesystem::temp_directory_path() / "hhdyn_test_record.csv";
  write_run_record_csv(rec, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t_au,norm,E_total,E_A,E_B,R_mean,z1_mean,z2_mean,dz1,dz2,I_A_e1,I_A_e2,I_B_e1,I_B_e2,"
                  "field_A,field_B");
  auto back = read_run_record_csv(path);
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].t == rec.samples[k].t);
    CHECK(back[k].norm == rec.samples[k].norm);
    CHECK(back[k].energy == rec.samples[k].energy);
    CHECK(back[k].flux.b_e2 == rec.samples[k].flux.b_e2);
  }
  std::filesystem::remove(path);
}
