#include "hhdyn/laser.hpp"

#include <cmath>
#include <numbers>

#include "hhdyn/errors.hpp"

namespace hhdyn {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool inside_pulse(const LaserPulse& pulse, double t) { return t >= 0.0 && t <= pulse.duration; }

}  // namespace

void LaserPulse::validate() const {
  if (!(duration > 0.0)) throw ConfigError("pulse.duration must be positive");
  if (!(frequency > 0.0)) throw ConfigError("pulse.frequency must be positive");
  if (const auto* g = std::get_if<GaussianEnvelope>(&envelope); g && !(g->width > 0.0)) {
    throw ConfigError("pulse.gaussian_width must be positive");
  }
  if (const auto* n = std::get_if<NarrowEnvelope>(&envelope); n && !(n->start < n->end)) {
    throw ConfigError("pulse.narrow_start must be below pulse.narrow_end");
  }
}

double LaserPulse::cycle_count() const { return frequency * duration / (2.0 * std::numbers::pi); }

double vector_potential_over_c(const LaserPulse& pulse, double t) {
  if (!inside_pulse(pulse, t)) return 0.0;
  const double s = std::sin(std::numbers::pi * t / pulse.duration);
  return pulse.amplitude / pulse.frequency * s * s * std::cos(pulse.frequency * t + pulse.cep);
}

double electric_field(const LaserPulse& pulse, double t) {
  if (!inside_pulse(pulse, t)) return 0.0;
  const double pi = std::numbers::pi;
  const double s = std::sin(pi * t / pulse.duration);
  const double phase = pulse.frequency * t + pulse.cep;
  const double switching = pi / (pulse.frequency * pulse.duration) * std::sin(2.0 * pi * t / pulse.duration);
  return pulse.amplitude * (s * s * std::sin(phase) - switching * std::cos(phase));
}

double spatial_envelope(const LaserPulse& pulse, double z) {
  return std::visit(overloaded{
                        [](const NoEnvelope&) { return 0.0; },
                        [](const UniformEnvelope&) { return 1.0; },
                        [z](const GaussianEnvelope& g) {
                          const double u = (z - g.center) / g.width;
                          return std::exp(-u * u);
                        },
                        [z](const NarrowEnvelope& n) {
                          if (z < n.start || z > n.end) return 0.0;
                          const double s = std::sin(std::numbers::pi * (z - n.start) / (n.end - n.start));
                          return s * s;
                        },
                    },
                    pulse.envelope);
}

EffectiveAmplitudes effective_amplitudes(const LaserPulse& pulse) {
  return {pulse.amplitude * spatial_envelope(pulse, kAtomACenter),
          pulse.amplitude * spatial_envelope(pulse, kAtomBCenter)};
}

DipoleCoupling dipole_coupling(const LaserPulse& pulse, const ProductGrid& grid, const PhysicalParams& params) {
  const double scale = 1.0 + params.dipole_correction();
  auto shape = [&](const Grid1D& g, bool active) {
    std::vector<double> c(g.size(), 0.0);
    if (!active) return c;
    for (std::size_t i = 0; i < g.size(); ++i) c[i] = scale * spatial_envelope(pulse, g.node(i)) * g.node(i);
    return c;
  };
  return {shape(grid.z1, pulse.drive_e1), shape(grid.z2, pulse.drive_e2)};
}

std::vector<double> interaction_potential(const LaserPulse& pulse, double t, const ProductGrid& grid,
                                          const PhysicalParams& params) {
  const auto c = dipole_coupling(pulse, grid, params);
  const double e = electric_field(pulse, t);
  std::vector<double> v(c.e1.size() * c.e2.size());
  for (std::size_t i = 0; i < c.e1.size(); ++i)
    for (std::size_t j = 0; j < c.e2.size(); ++j) v[i * c.e2.size() + j] = e * (c.e1[i] + c.e2[j]);
  return v;
}

}  // namespace hhdyn
