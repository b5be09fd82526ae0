#include "hhdyn/grids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hhdyn/errors.hpp"

namespace hhdyn {
namespace {

constexpr std::size_t kMinPoints = 8;

std::vector<double> fourier_wavenumbers(std::size_t n, double spacing) {
  std::vector<double> k(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * spacing);
  for (std::size_t m = 0; m < n; ++m) {
    const auto signed_m = (m < (n + 1) / 2) ? static_cast<double>(m)
                                            : static_cast<double>(m) - static_cast<double>(n);
    k[m] = dk * signed_m;
  }
  return k;
}

// Normalized Hermite functions phi_0..phi_{n-1} at x.
std::vector<double> hermite_functions(std::size_t n, double x) {
  std::vector<double> phi(n);
  phi[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
  if (n > 1) phi[1] = std::sqrt(2.0) * x * phi[0];
  for (std::size_t m = 1; m + 1 < n; ++m) {
    const double md = static_cast<double>(m);
    phi[m + 1] = std::sqrt(2.0 / (md + 1.0)) * x * phi[m] - std::sqrt(md / (md + 1.0)) * phi[m - 1];
  }
  return phi;
}

struct HermiteBasis {
  Eigen::VectorXd nodes;    // unscaled Gauss-Hermite nodes
  Eigen::MatrixXd vectors;  // columns: DVR functions in the oscillator basis
  Eigen::VectorXd unit_weights;  // 1 / sum_m phi_m(x_i)^2
};

HermiteBasis hermite_basis(std::size_t n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t m = 0; m + 1 < n; ++m) sub[static_cast<Eigen::Index>(m)] = std::sqrt((m + 1.0) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);

  HermiteBasis basis{solver.eigenvalues(), solver.eigenvectors(), Eigen::VectorXd(diag.size())};
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (basis.vectors(0, i) < 0.0) basis.vectors.col(i) *= -1.0;
    const auto phi = hermite_functions(n, basis.nodes[i]);
    double sum = 0.0;
    for (double p : phi) sum += p * p;
    basis.unit_weights[i] = 1.0 / sum;
  }
  return basis;
}

}  // namespace

std::string to_string(AxisLabel label) {
  switch (label) {
    case AxisLabel::R: return "R";
    case AxisLabel::Z1: return "z1";
    case AxisLabel::Z2: return "z2";
  }
  return "?";
}

Grid1D Grid1D::equidistant(AxisLabel label, double min, double max, std::size_t n) {
  if (n < kMinPoints) {
    throw ConfigError("grid " + to_string(label) + ": need at least 8 points, got " + std::to_string(n));
  }
  if (!(max > min)) {
    throw ConfigError("grid " + to_string(label) + ": max must exceed min");
  }
  Grid1D g;
  g.label_ = label;
  g.kind_ = Kind::Equidistant;
  g.spacing_ = (max - min) / static_cast<double>(n - 1);
  g.nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.nodes_[i] = min + g.spacing_ * static_cast<double>(i);
  g.nodes_.back() = max;
  g.weights_.assign(n, g.spacing_);
  return g;
}

Grid1D Grid1D::hermite(AxisLabel label, std::size_t n, double scale) {
  if (n < kMinPoints) {
    throw ConfigError("grid " + to_string(label) + ": need at least 8 points, got " + std::to_string(n));
  }
  if (!(scale > 0.0)) throw ConfigError("grid " + to_string(label) + ": Hermite scale must be positive");
  const auto basis = hermite_basis(n);
  Grid1D g;
  g.label_ = label;
  g.kind_ = Kind::Hermite;
  g.scale_ = scale;
  g.nodes_.resize(n);
  g.weights_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes_[i] = scale * basis.nodes[static_cast<Eigen::Index>(i)];
    g.weights_[i] = scale * basis.unit_weights[static_cast<Eigen::Index>(i)];
  }
  return g;
}

std::size_t Grid1D::nearest_index(double x) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.begin()) return 0;
  if (it == nodes_.end()) return nodes_.size() - 1;
  auto prev = it - 1;
  return static_cast<std::size_t>(((x - *prev) <= (*it - x) ? prev : it) - nodes_.begin());
}

bool Grid1D::same_nodes(const Grid1D& other) const {
  return kind_ == other.kind_ && nodes_ == other.nodes_;
}

const Grid1D& ProductGrid::axis(int a) const {
  switch (a) {
    case 0:
      if (!r) throw ConfigError("R axis requested on a frozen-nuclei grid");
      return *r;
    case 1: return z1;
    default: return z2;
  }
}

AxisOperator::AxisOperator(std::shared_ptr<const SpectralTransform> fft, std::vector<cplx> multipliers,
                           int axis)
    : fft_(std::move(fft)), multipliers_(std::move(multipliers)), shape_(fft_->shape()), axis_(axis) {}

AxisOperator::AxisOperator(Eigen::MatrixXcd matrix, Shape3 shape, int axis)
    : matrix_(std::move(matrix)), shape_(shape), axis_(axis) {}

void AxisOperator::apply(std::span<cplx> data) const {
  const std::size_t n = shape_.n[axis_];
  const std::size_t stride = shape_.stride(axis_);
  const std::size_t outer = shape_.size() / (n * stride);
  if (fft_) {
    fft_->forward(data.data());
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t k = 0; k < n; ++k) {
        cplx* row = data.data() + (o * n + k) * stride;
        const cplx m = multipliers_[k];
        for (std::size_t s = 0; s < stride; ++s) row[s] *= m;
      }
    }
    fft_->backward(data.data());
    return;
  }
  Eigen::VectorXcd line(static_cast<Eigen::Index>(n));
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      cplx* base = data.data() + o * n * stride + s;
      for (std::size_t k = 0; k < n; ++k) line[static_cast<Eigen::Index>(k)] = base[k * stride];
      const Eigen::VectorXcd out = matrix_ * line;
      for (std::size_t k = 0; k < n; ++k) base[k * stride] = out[static_cast<Eigen::Index>(k)];
    }
  }
}

KineticOperator1D::KineticOperator1D(const Grid1D& grid, double inverse_mass_prefactor)
    : grid_(grid), prefactor_(inverse_mass_prefactor) {
  if (!(prefactor_ > 0.0)) throw ConfigError("kinetic prefactor must be positive");
  const std::size_t n = grid_.size();
  if (grid_.is_equidistant()) {
    wavenumbers_ = fourier_wavenumbers(n, grid_.spacing());
    spectrum_.resize(n);
    for (std::size_t m = 0; m < n; ++m) spectrum_[m] = prefactor_ * wavenumbers_[m] * wavenumbers_[m];
    return;
  }
  // Hermite DVR: p^2 in the truncated oscillator basis, rotated to the DVR basis.
  const auto basis = hermite_basis(n);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd p2 = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index m = 0; m < ni; ++m) {
    p2(m, m) = static_cast<double>(m) + 0.5;
    if (m + 2 < ni) {
      const double v = -0.5 * std::sqrt((m + 1.0) * (m + 2.0));
      p2(m, m + 2) = v;
      p2(m + 2, m) = v;
    }
  }
  const double s = grid_.hermite_scale();
  const Eigen::MatrixXd t_dvr = (prefactor_ / (s * s)) * (basis.vectors.transpose() * p2 * basis.vectors);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t_dvr);
  dvr_eigenvalues_ = solver.eigenvalues();
  dvr_eigenvectors_ = solver.eigenvectors();
  sqrt_weights_ = basis.unit_weights.cwiseSqrt();
}

void KineticOperator1D::apply(std::span<const cplx> in, std::span<cplx> out) const {
  const Shape3 shape{{1, grid_.size(), 1}};
  std::copy(in.begin(), in.end(), out.begin());
  action_along(shape, 1).apply(out);
}

AxisOperator KineticOperator1D::action_along(Shape3 shape, int axis) const {
  const std::size_t n = grid_.size();
  if (is_fourier()) {
    auto fft = std::make_shared<const SpectralTransform>(shape, std::vector<int>{axis});
    std::vector<cplx> mult(n);
    for (std::size_t m = 0; m < n; ++m) mult[m] = spectrum_[m] / static_cast<double>(n);
    return AxisOperator(std::move(fft), std::move(mult), axis);
  }
  const Eigen::MatrixXd t = sqrt_weights_.cwiseInverse().asDiagonal() *
                            (dvr_eigenvectors_ * dvr_eigenvalues_.asDiagonal() * dvr_eigenvectors_.transpose()) *
                            sqrt_weights_.asDiagonal();
  return AxisOperator(t.cast<cplx>(), shape, axis);
}

AxisOperator KineticOperator1D::evolution_along(Shape3 shape, int axis, cplx tau) const {
  const std::size_t n = grid_.size();
  if (is_fourier()) {
    auto fft = std::make_shared<const SpectralTransform>(shape, std::vector<int>{axis});
    std::vector<cplx> mult(n);
    for (std::size_t m = 0; m < n; ++m) mult[m] = std::exp(-tau * spectrum_[m]) / static_cast<double>(n);
    return AxisOperator(std::move(fft), std::move(mult), axis);
  }
  Eigen::VectorXcd phases(dvr_eigenvalues_.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::exp(-tau * dvr_eigenvalues_[i]);
  const Eigen::MatrixXcd q = dvr_eigenvectors_.cast<cplx>();
  const Eigen::MatrixXcd e = sqrt_weights_.cwiseInverse().cast<cplx>().asDiagonal() *
                             (q * phases.asDiagonal() * q.transpose()) * sqrt_weights_.cast<cplx>().asDiagonal();
  return AxisOperator(e, shape, axis);
}

Grid1D build_equidistant_grid(double min, double max, std::size_t n, AxisLabel label) {
  return Grid1D::equidistant(label, min, max, n);
}

KineticOperator1D build_kinetic(const Grid1D& grid, double inverse_mass_prefactor) {
  return KineticOperator1D(grid, inverse_mass_prefactor);
}

std::vector<double> first_derivative_row(const Grid1D& grid, std::size_t node) {
  const std::size_t n = grid.size();
  std::vector<double> row(n, 0.0);
  if (grid.is_equidistant()) {
    const auto k = fourier_wavenumbers(n, grid.spacing());
    for (std::size_t j = 0; j < n; ++j) {
      const double offset = (static_cast<double>(node) - static_cast<double>(j)) * grid.spacing();
      double acc = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (n % 2 == 0 && m == n / 2) continue;  // Nyquist bin has no odd-derivative partner
        acc -= k[m] * std::sin(k[m] * offset);
      }
      row[j] = acc / static_cast<double>(n);
    }
    return row;
  }
  const auto basis = hermite_basis(n);
  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(ni, ni);
  for (Eigen::Index m = 0; m + 1 < ni; ++m) {
    const double v = std::sqrt((m + 1.0) / 2.0);
    d(m, m + 1) = v;
    d(m + 1, m) = -v;
  }
  const Eigen::MatrixXd d_dvr = basis.vectors.transpose() * d * basis.vectors;
  const Eigen::VectorXd sw = basis.unit_weights.cwiseSqrt();
  const auto r = static_cast<Eigen::Index>(node);
  for (Eigen::Index j = 0; j < ni; ++j) {
    row[static_cast<std::size_t>(j)] = d_dvr(r, j) * sw[j] / (sw[r] * grid.hermite_scale());
  }
  return row;
}

}  // namespace hhdyn
