#include "hhdyn/potentials.hpp"

#include <cmath>
#include <new>
#include <string>
#include <utility>

#include "hhdyn/errors.hpp"

namespace hhdyn {

void PhysicalParams::validate() const {
  if (!(proton_mass > 0.0)) throw ConfigError("physics.proton_mass must be positive");
  if (!(alpha > 0.0)) throw ConfigError("physics.alpha must be positive");
  if (!(beta > 0.0)) throw ConfigError("physics.beta must be positive");
}

double v_pp(double r) {
  if (!(r > 0.0)) throw std::domain_error("v_pp: internuclear distance must be positive");
  return 1.0 / r;
}

double v_ee(double z1, double z2, double alpha) {
  const double d = z1 - z2;
  return 1.0 / std::sqrt(d * d + alpha);
}

double proton_attraction(double z, double center, double beta) {
  const double d = z - center;
  return -1.0 / std::sqrt(d * d + beta);
}

double v_ep(double z, double r, double beta) {
  return proton_attraction(z, 0.5 * r, beta) + proton_attraction(z, -0.5 * r, beta);
}

PotentialField::PotentialField(Shape3 shape, std::vector<double> values)
    : kind_(PotentialKind::Full), shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size()) throw ConfigError("potential table size does not match the grid");
}

PotentialField::PotentialField(PotentialKind kind, const ProductGrid& grid, const PhysicalParams& params)
    : kind_(kind), shape_(grid.shape()) {
  params.validate();
  try {
    values_.resize(shape_.size());
  } catch (const std::bad_alloc&) {
    throw ConfigError("potential: cannot allocate " + std::to_string(shape_.size() * sizeof(double)) +
                      " bytes");
  }
  const std::size_t n1 = shape_.n[1];
  const std::size_t n2 = shape_.n[2];
  std::vector<double> e1(n1), e2(n2);
  std::vector<double> ee(kind == PotentialKind::Full ? n1 * n2 : 0);
  if (kind == PotentialKind::Full) {
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) ee[i * n2 + j] = v_ee(grid.z1.node(i), grid.z2.node(j), params.alpha);
  }
  for (std::size_t ir = 0; ir < shape_.n[0]; ++ir) {
    const double r = grid.r_node(ir);
    double base = 0.0;
    if (kind == PotentialKind::Full) {
      base = v_pp(r);
      for (std::size_t i = 0; i < n1; ++i) e1[i] = v_ep(grid.z1.node(i), r, params.beta);
      for (std::size_t j = 0; j < n2; ++j) e2[j] = v_ep(grid.z2.node(j), r, params.beta);
    } else {
      for (std::size_t i = 0; i < n1; ++i) e1[i] = proton_attraction(grid.z1.node(i), -0.5 * r, params.beta);
      for (std::size_t j = 0; j < n2; ++j) e2[j] = proton_attraction(grid.z2.node(j), 0.5 * r, params.beta);
    }
    double* slab = values_.data() + shape_.index(ir, 0, 0);
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        double v = base + e1[i] + e2[j];
        if (!ee.empty()) v += ee[i * n2 + j];
        slab[i * n2 + j] = v;
      }
    }
  }
}

PotentialField assemble_potential(PotentialKind kind, const ProductGrid& grid, const PhysicalParams& params) {
  return PotentialField(kind, grid, params);
}

}  // namespace hhdyn
