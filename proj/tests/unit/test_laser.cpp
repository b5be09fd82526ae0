#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hhdyn/laser.hpp"
#include "oracles.hpp"

using namespace hhdyn;

namespace {

LaserPulse gaussian_pulse() {
  LaserPulse p;
  p.amplitude = 1.0;
  p.envelope = GaussianEnvelope{};
  return p;
}

}  // namespace

TEST_CASE("unit conversion") {
  CHECK(fs_to_au(5.0) == doctest::Approx(206.7069).epsilon(1e-6));
  CHECK(au_to_fs(fs_to_au(2.5)) == doctest::Approx(2.5));
}

TEST_CASE("effective amplitudes") {
  auto g = effective_amplitudes(gaussian_pulse());
  CHECK(std::abs(g.atom_a - 0.125) <= 1e-3);
  CHECK(std::abs(g.atom_b - 0.088) <= 1e-3);

  LaserPulse narrow;
  narrow.amplitude = 0.02;
  narrow.envelope = NarrowEnvelope{};
  auto n = effective_amplitudes(narrow);
  CHECK(n.atom_a == doctest::Approx(0.02));
  CHECK(n.atom_b == 0.0);

  auto off = effective_amplitudes(LaserPulse{});
  CHECK(off.atom_a == 0.0);
  CHECK(off.atom_b == 0.0);
}

TEST_CASE("pulse carries no direct-current component") {
  for (double cep : {0.0, 0.7, 2.0}) {
    auto p = gaussian_pulse();
    p.cep = cep;
    const double integral = oracle::gauss_legendre([&](double t) { return electric_field(p, t); }, 0.0,
                                                   p.duration, 400);
    CHECK(std::abs(integral) <= 1e-10 * p.amplitude * p.duration);
  }
}

TEST_CASE("field is minus the time derivative of the vector potential") {
  auto p = gaussian_pulse();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, p.duration);
  const double h = 1e-3;
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    const double d = (-vector_potential_over_c(p, t + 2 * h) + 8 * vector_potential_over_c(p, t + h) -
                      8 * vector_potential_over_c(p, t - h) + vector_potential_over_c(p, t - 2 * h)) /
                     (12 * h);
    CHECK(std::abs(electric_field(p, t) + d) <= 1e-7);
  }
  CHECK(electric_field(p, -1.0) == 0.0);
  CHECK(electric_field(p, p.duration + 1.0) == 0.0);
}

TEST_CASE("cycle count") {
  LaserPulse p;
  CHECK(std::abs(p.cycle_count() - 32.9) <= 0.1);
}

TEST_CASE("envelopes stay in the unit interval") {
  for (auto env : {SpatialEnvelope{GaussianEnvelope{}}, SpatialEnvelope{NarrowEnvelope{}},
                   SpatialEnvelope{UniformEnvelope{}}, SpatialEnvelope{NoEnvelope{}}}) {
    LaserPulse p;
    p.amplitude = 1;
    p.envelope = env;
    for (double z = -3000; z <= 3000; z += 0.37) {
      const double f = spatial_envelope(p, z);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
  LaserPulse n;
  n.envelope = NarrowEnvelope{};
  CHECK(spatial_envelope(n, -50) == doctest::Approx(1.0));
  CHECK(spatial_envelope(n, -60) == doctest::Approx(0.0));
  CHECK(spatial_envelope(n, -30) == 0.0);
}

TEST_CASE("interaction potential with electron masks") {
  ProductGrid g;
  g.z1 = build_equidistant_grid(-100, 100, 41, AxisLabel::Z1);
  g.z2 = build_equidistant_grid(-100, 100, 41, AxisLabel::Z2);
  PhysicalParams params;
  auto p = gaussian_pulse();
  p.drive_e2 = false;
  const double t = 37.0;
  auto v = interaction_potential(p, t, g, params);
  const double e = electric_field(p, t);
  for (std::size_t i1 = 0; i1 < 41; ++i1) {
    for (std::size_t i2 = 0; i2 < 41; ++i2) {
      const double z1 = g.z1.node(i1);
      const double expect = e * (1 + params.dipole_correction()) * spatial_envelope(p, z1) * z1;
      CHECK(v[i1 * 41 + i2] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(intensity_w_cm2(1.0) == doctest::Approx(3.509e16));
}
