#include "hhdyn/state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hhdyn/observables.hpp"
#include "hhdyn/split_step.hpp"

namespace hhdyn {
namespace {

std::vector<double> slice_weights(const Wavefunction& psi) {
  const Shape3 s = psi.shape();
  const auto& g = psi.grid();
  std::vector<double> w(s.n[0], 0.0);
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    double slab = 0.0;
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      const cplx* row = psi.data().data() + s.index(ir, i, 0);
      double acc = 0.0;
      for (std::size_t j = 0; j < s.n[2]; ++j) acc += std::norm(row[j]) * g.z2.weight(j);
      slab += acc * g.z1.weight(i);
    }
    w[ir] = slab * g.r_weight(ir);
  }
  return w;
}

}  // namespace

InitialStateSpec InitialStateSpec::defaults_for(InitialKind kind) {
  InitialStateSpec spec;
  spec.kind = kind;
  spec.relax.hamiltonian =
      kind == InitialKind::DirectProduct ? PotentialKind::ReducedNoninteracting : PotentialKind::Full;
  return spec;
}

void InitialStateSpec::validate() const {
  if (!(r0 > 0.0)) throw ConfigError("initial.r0 must be positive");
  if (!(sigma_r > 0.0)) throw ConfigError("initial.sigma_r must be positive");
  if (!(relax.dtau > 0.0)) throw ConfigError("initial.dtau must be positive");
  if (!(relax.tolerance > 0.0)) throw ConfigError("initial.tolerance must be positive");
  if (relax.max_steps == 0) throw ConfigError("initial.max_steps must be positive");
}

Wavefunction seed_initial(const InitialStateSpec& spec, const ProductGrid& grid) {
  spec.validate();
  for (const Grid1D* g : {&grid.z1, &grid.z2}) {
    if (!g->contains(spec.z_a) || !g->contains(spec.z_b)) {
      throw ConfigError("atom centers lie outside the " + to_string(g->label()) + " grid");
    }
  }
  if (grid.r && !grid.r->contains(spec.r0)) throw ConfigError("initial.r0 lies outside the R grid");

  auto orbital = [](const Grid1D& g, double center) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-std::abs(g.node(i) - center));
    return f;
  };
  const auto a1 = orbital(grid.z1, spec.z_a), b1 = orbital(grid.z1, spec.z_b);
  const auto a2 = orbital(grid.z2, spec.z_a), b2 = orbital(grid.z2, spec.z_b);

  Wavefunction psi(grid);
  const Shape3 s = psi.shape();
  for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
    double nuclear = 1.0;
    if (grid.r) {
      const double u = (grid.r->node(ir) - spec.r0) / spec.sigma_r;
      nuclear = std::exp(-0.5 * u * u);
    }
    for (std::size_t i = 0; i < s.n[1]; ++i) {
      for (std::size_t j = 0; j < s.n[2]; ++j) {
        double e = a1[i] * b2[j];
        if (spec.kind == InitialKind::EntangledSinglet) e += b1[i] * a2[j];
        psi.at(ir, i, j) = nuclear * e;
      }
    }
  }
  psi.normalize();
  return psi;
}

RelaxResult relax_imaginary_time(Wavefunction psi, const InitialStateSpec& spec, const PotentialField& hamiltonian,
                                 const PhysicalParams& params) {
  spec.validate();
  psi.normalize();
  const auto& grid = psi.grid();
  const bool freeze = spec.relax.freeze_r && grid.r.has_value();
  const SplitStepper stepper(grid, params, hamiltonian, cplx{spec.relax.dtau, 0.0}, nullptr, !freeze);
  const std::vector<double> target = freeze ? slice_weights(psi) : std::vector<double>{};

  RelaxResult result{psi, 0.0, 0, {}};
  Wavefunction& w = result.psi;
  double previous = std::numeric_limits<double>::infinity();
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t n = 1; n <= spec.relax.max_steps; ++n) {
    stepper.step(w);
    const double n2 = w.norm_squared();
    if (!std::isfinite(n2) || !(n2 > 0.0)) {
      throw NumericalError("imaginary-time step " + std::to_string(n) + " produced a non-finite state");
    }
    const double estimate = -0.5 * std::log(n2) / spec.relax.dtau;
    result.estimates.push_back(estimate);
    if (freeze) {
      const auto current = slice_weights(w);
      const Shape3 s = w.shape();
      for (std::size_t ir = 0; ir < s.n[0]; ++ir) {
        const double f = current[ir] > 0.0 ? std::sqrt(target[ir] / current[ir]) : 0.0;
        cplx* slab = w.data().data() + s.index(ir, 0, 0);
        for (std::size_t k = 0; k < s.n[1] * s.n[2]; ++k) slab[k] *= f;
      }
    }
    w.normalize();
    residual = std::abs(estimate - previous);
    previous = estimate;
    result.steps = n;
    if (residual < spec.relax.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw RelaxationError("imaginary-time relaxation did not converge in " + std::to_string(spec.relax.max_steps) +
                              " steps (last energy " + std::to_string(previous) + ", residual " +
                              std::to_string(residual) + ")",
                          previous, residual);
  }
  const EnergyEvaluator evaluator(grid, params);
  result.energy = evaluator.expectation(w, hamiltonian);
  return result;
}

AtomRelaxResult relax_single_atom(const Grid1D& grid, double beta, double reduced_mass, double dtau,
                                  double tolerance, std::size_t max_steps) {
  const std::size_t n = grid.size();
  const Shape3 shape{{1, n, 1}};
  const KineticOperator1D kinetic(grid, 0.5 / reduced_mass);
  const AxisOperator evolve = kinetic.evolution_along(shape, 1, cplx{dtau, 0.0});

  std::vector<double> v(n), half(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = proton_attraction(grid.node(i), 0.0, beta);
    half[i] = std::exp(-0.5 * dtau * v[i]);
  }
  auto norm2 = [&](const ComplexBuffer& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += grid.weight(i) * std::norm(f[i]);
    return acc;
  };
  ComplexBuffer psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = std::exp(-std::abs(grid.node(i)));
  {
    const double s = 1.0 / std::sqrt(norm2(psi));
    for (auto& a : psi) a *= s;
  }

  AtomRelaxResult out;
  double previous = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::size_t step = 1; step <= max_steps; ++step) {
    for (std::size_t i = 0; i < n; ++i) psi[i] *= half[i];
    evolve.apply(psi);
    for (std::size_t i = 0; i < n; ++i) psi[i] *= half[i];
    const double n2 = norm2(psi);
    const double estimate = -0.5 * std::log(n2) / dtau;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& a : psi) a *= s;
    out.steps = step;
    if (std::abs(estimate - previous) < tolerance) {
      converged = true;
      break;
    }
    previous = estimate;
  }
  if (!converged) throw RelaxationError("single-atom relaxation did not converge", previous, 0.0);

  std::vector<cplx> t(n);
  kinetic.apply(std::span<const cplx>(psi.data(), n), t);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += grid.weight(i) * (std::conj(psi[i]) * (t[i] + v[i] * psi[i])).real();
  out.energy = e;
  out.psi.assign(psi.begin(), psi.end());
  return out;
}

double exchange_symmetry_defect(const Wavefunction& psi) {
  const auto& g = psi.grid();
  if (!g.z1.same_nodes(g.z2)) throw ConfigError("exchange symmetry needs identical z1 and z2 grids");
  const Shape3 s = psi.shape();
  double worst = 0.0;
  for (std::size_t ir = 0; ir < s.n[0]; ++ir)
    for (std::size_t i = 0; i < s.n[1]; ++i)
      for (std::size_t j = i + 1; j < s.n[2]; ++j) worst = std::max(worst, std::abs(psi.at(ir, i, j) - psi.at(ir, j, i)));
  return worst;
}

}  // namespace hhdyn
