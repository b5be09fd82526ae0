#include "hhdyn/split_step.hpp"

#include <cmath>

#include "hhdyn/errors.hpp"

namespace hhdyn {
namespace {

double ramp(double depth, double width, double strength, int order) {
  return depth > 0.0 ? strength * std::pow(depth / width, order) : 0.0;
}

}  // namespace

CapField build_cap(const ProductGrid& grid, const CapSpec& spec, double detector_position) {
  CapField cap{std::vector<double>(grid.n_r(), 0.0), std::vector<double>(grid.z1.size(), 0.0),
               std::vector<double>(grid.z2.size(), 0.0)};
  if (!spec.enabled) return cap;
  if (!(spec.z_strength >= 0.0) || !(spec.r_strength >= 0.0)) throw ConfigError("cap strength must be >= 0");
  if (!(spec.z_width > 0.0) || !(spec.r_width > 0.0)) throw ConfigError("cap width must be positive");
  if (spec.order < 1) throw ConfigError("cap order must be >= 1");
  for (const Grid1D* g : {&grid.z1, &grid.z2}) {
    if (!(spec.z_start > 0.0) || spec.z_start >= g->max() || -spec.z_start <= g->min()) {
      throw ConfigError("cap onset " + std::to_string(spec.z_start) + " is not inside the " + to_string(g->label()) +
                        " grid");
    }
  }
  if (detector_position >= spec.z_start) {
    throw ConfigError("flux detectors at +-" + std::to_string(detector_position) +
                      " overlap the absorber starting at +-" + std::to_string(spec.z_start));
  }
  auto fill = [&](const Grid1D& g, std::vector<double>& w) {
    for (std::size_t i = 0; i < g.size(); ++i)
      w[i] = ramp(std::abs(g.node(i)) - spec.z_start, spec.z_width, spec.z_strength, spec.order);
  };
  fill(grid.z1, cap.z1);
  fill(grid.z2, cap.z2);
  if (grid.r) {
    const auto& r = *grid.r;
    if (!(spec.r_low_end > r.min() && spec.r_high_start < r.max() && spec.r_low_end < spec.r_high_start)) {
      throw ConfigError("R absorber ramps must lie inside the R grid");
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double x = r.node(i);
      cap.r[i] = ramp(spec.r_low_end - x, spec.r_width, spec.r_strength, spec.order) +
                 ramp(x - spec.r_high_start, spec.r_width, spec.r_strength, spec.order);
    }
  }
  return cap;
}

SplitStepper::SplitStepper(const ProductGrid& grid, const PhysicalParams& params, const PotentialField& potential,
                           cplx tau, const CapField* cap, bool nuclear_kinetic)
    : shape_(grid.shape()), tau_(tau) {
  if (!(potential.shape() == shape_)) throw ConfigError("potential and grid shapes differ");
  const std::size_t nr = shape_.n[0], n1 = shape_.n[1], n2 = shape_.n[2];
  const auto v = potential.values();
  first_half_.resize(shape_.size());
  second_half_.resize(shape_.size());
  const double dt = tau.imag();
  for (std::size_t ir = 0; ir < nr; ++ir) {
    for (std::size_t i = 0; i < n1; ++i) {
      for (std::size_t j = 0; j < n2; ++j) {
        const std::size_t k = shape_.index(ir, i, j);
        const cplx half = std::exp(-0.5 * tau * v[k]);
        first_half_[k] = half;
        second_half_[k] = cap ? half * std::exp(-cap->at(ir, i, j) * dt) : half;
      }
    }
  }

  const double electron_prefactor = 0.5 / params.electron_reduced_mass();
  std::optional<KineticOperator1D> kin_r;
  if (grid.r && nuclear_kinetic) kin_r.emplace(*grid.r, 1.0 / params.proton_mass);
  const KineticOperator1D kin1(grid.z1, electron_prefactor);
  const KineticOperator1D kin2(grid.z2, electron_prefactor);

  std::vector<int> fourier_axes;
  std::size_t fourier_points = 1;
  auto multipliers = [&](const KineticOperator1D& k) {
    std::vector<cplx> m(k.spectrum().size());
    for (std::size_t q = 0; q < m.size(); ++q) m[q] = std::exp(-tau * k.spectrum()[q]);
    return m;
  };
  mult_r_.assign(nr, cplx{1.0, 0.0});
  std::vector<cplx> m1(n1, cplx{1.0, 0.0}), m2(n2, cplx{1.0, 0.0});
  if (kin_r) {
    if (kin_r->is_fourier()) {
      mult_r_ = multipliers(*kin_r);
      fourier_axes.push_back(0);
      fourier_points *= nr;
    } else {
      dense_axes_.push_back(kin_r->evolution_along(shape_, 0, tau));
    }
  }
  if (kin1.is_fourier()) {
    m1 = multipliers(kin1);
    fourier_axes.push_back(1);
    fourier_points *= n1;
  } else {
    dense_axes_.push_back(kin1.evolution_along(shape_, 1, tau));
  }
  if (kin2.is_fourier()) {
    m2 = multipliers(kin2);
    fourier_axes.push_back(2);
    fourier_points *= n2;
  } else {
    dense_axes_.push_back(kin2.evolution_along(shape_, 2, tau));
  }
  if (!fourier_axes.empty()) {
    fft_ = std::make_shared<SpectralTransform>(shape_, fourier_axes);
    const double scale = 1.0 / static_cast<double>(fourier_points);
    mult_z_.resize(n1 * n2);
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n2; ++j) mult_z_[i * n2 + j] = scale * m1[i] * m2[j];
  }
}

void SplitStepper::kick(Wavefunction& psi, const ComplexBuffer& factors, const std::vector<cplx>& l1,
                        const std::vector<cplx>& l2) const {
  const std::size_t rows = shape_.n[0] * shape_.n[1];
  const std::size_t n1 = shape_.n[1], n2 = shape_.n[2];
  cplx* data = psi.data().data();
  const bool laser = !l1.empty();
#pragma omp parallel for schedule(static)
  for (std::size_t row = 0; row < rows; ++row) {
    cplx* p = data + row * n2;
    const cplx* f = factors.data() + row * n2;
    if (laser) {
      const cplx a = l1[row % n1];
      for (std::size_t j = 0; j < n2; ++j) p[j] *= f[j] * (a * l2[j]);
    } else {
      for (std::size_t j = 0; j < n2; ++j) p[j] *= f[j];
    }
  }
}

void SplitStepper::kinetic(Wavefunction& psi) const {
  if (fft_) {
    cplx* data = psi.data().data();
    fft_->forward(data);
    const std::size_t n1 = shape_.n[1], n2 = shape_.n[2];
    const std::size_t rows = shape_.n[0] * n1;
#pragma omp parallel for schedule(static)
    for (std::size_t row = 0; row < rows; ++row) {
      const cplx mr = mult_r_[row / n1];
      const cplx* m = mult_z_.data() + (row % n1) * n2;
      cplx* p = data + row * n2;
      for (std::size_t j = 0; j < n2; ++j) p[j] *= mr * m[j];
    }
    fft_->backward(data);
  }
  for (const auto& op : dense_axes_) op.apply(psi.data());
}

void SplitStepper::step(Wavefunction& psi, const DipoleCoupling* coupling, double field) const {
  if (!(psi.shape() == shape_)) throw ConfigError("wavefunction shape does not match the stepper");
  std::vector<cplx> l1, l2;
  if (coupling && field != 0.0) {
    l1.resize(coupling->e1.size());
    l2.resize(coupling->e2.size());
    for (std::size_t i = 0; i < l1.size(); ++i) l1[i] = std::exp(-0.5 * tau_ * field * coupling->e1[i]);
    for (std::size_t j = 0; j < l2.size(); ++j) l2[j] = std::exp(-0.5 * tau_ * field * coupling->e2[j]);
  }
  kick(psi, first_half_, l1, l2);
  kinetic(psi);
  kick(psi, second_half_, l1, l2);
}

}  // namespace hhdyn
