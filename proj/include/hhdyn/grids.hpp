#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hhdyn/fft.hpp"
#include "hhdyn/types.hpp"

namespace hhdyn {

enum class AxisLabel { R, Z1, Z2 };

std::string to_string(AxisLabel label);

/// One coordinate axis: strictly increasing nodes with positive quadrature weights.
///
/// Equidistant grids are periodic Fourier grids whose nodes include both
/// endpoints; the period is n * spacing. Hermite grids carry scaled
/// Gauss-Hermite nodes and the matching DVR weights.
class Grid1D {
 public:
  enum class Kind { Equidistant, Hermite };

  Grid1D() = default;

  static Grid1D equidistant(AxisLabel label, double min, double max, std::size_t n);
  /// Gauss-Hermite nodes of order n multiplied by `scale` (a.u.).
  static Grid1D hermite(AxisLabel label, std::size_t n, double scale);

  AxisLabel label() const { return label_; }
  Kind kind() const { return kind_; }
  bool is_equidistant() const { return kind_ == Kind::Equidistant; }
  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double min() const { return nodes_.front(); }
  double max() const { return nodes_.back(); }
  /// Node spacing; zero for Hermite grids.
  double spacing() const { return spacing_; }
  double hermite_scale() const { return scale_; }

  std::size_t nearest_index(double x) const;
  bool contains(double x) const { return x >= min() && x <= max(); }

  bool same_nodes(const Grid1D& other) const;

 private:
  AxisLabel label_ = AxisLabel::Z1;
  Kind kind_ = Kind::Equidistant;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double spacing_ = 0.0;
  double scale_ = 0.0;
};

/// (R, z1, z2) product grid. When `r` is empty the nuclei are frozen at
/// `frozen_r` and the R extent collapses to a single unit-weight point.
struct ProductGrid {
  std::optional<Grid1D> r;
  double frozen_r = 100.0;
  Grid1D z1;
  Grid1D z2;

  bool frozen_nuclei() const { return !r.has_value(); }
  std::size_t n_r() const { return r ? r->size() : 1; }
  double r_node(std::size_t i) const { return r ? r->node(i) : frozen_r; }
  double r_weight(std::size_t i) const { return r ? r->weight(i) : 1.0; }
  Shape3 shape() const { return Shape3{{n_r(), z1.size(), z2.size()}}; }
  const Grid1D& axis(int a) const;
};

/// Applies a fixed linear 1D operator along one axis of a Shape3 array, in place.
class AxisOperator {
 public:
  /// Diagonal in Fourier space: data <- IFFT(mult * FFT(data)); `multipliers`
  /// already include the 1/N normalization.
  AxisOperator(std::shared_ptr<const SpectralTransform> fft, std::vector<cplx> multipliers, int axis);
  /// Dense matrix acting on nodal values along the axis.
  AxisOperator(Eigen::MatrixXcd matrix, Shape3 shape, int axis);

  void apply(std::span<cplx> data) const;
  int axis() const { return axis_; }

 private:
  std::shared_ptr<const SpectralTransform> fft_;
  std::vector<cplx> multipliers_;
  Eigen::MatrixXcd matrix_;
  Shape3 shape_;
  int axis_ = 0;
};

/// -prefactor * d^2/dx^2 on one axis. Fourier multipliers prefactor*k^2 for
/// equidistant grids, a dense Hermite DVR matrix (on nodal values) otherwise.
class KineticOperator1D {
 public:
  KineticOperator1D(const Grid1D& grid, double inverse_mass_prefactor);

  const Grid1D& grid() const { return grid_; }
  double prefactor() const { return prefactor_; }
  bool is_fourier() const { return grid_.is_equidistant(); }

  /// prefactor * k^2 for each FFT bin (Fourier backend only).
  std::span<const double> spectrum() const { return spectrum_; }
  /// Standard discrete wavenumbers 2*pi*fftfreq (Fourier backend only).
  std::span<const double> wavenumbers() const { return wavenumbers_; }

  /// out = T in on a single line of nodal values.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  /// T along `axis` of a Shape3 array.
  AxisOperator action_along(Shape3 shape, int axis) const;
  /// exp(-tau T) along `axis`; tau = i*dt for real time, tau = dtau for imaginary time.
  AxisOperator evolution_along(Shape3 shape, int axis, cplx tau) const;

 private:
  Grid1D grid_;
  double prefactor_;
  std::vector<double> wavenumbers_;
  std::vector<double> spectrum_;
  // Hermite backend: T = D^{-1} V diag(lambda) V^T D with D = diag(sqrt(w)).
  Eigen::VectorXd dvr_eigenvalues_;
  Eigen::MatrixXd dvr_eigenvectors_;
  Eigen::VectorXd sqrt_weights_;
};

Grid1D build_equidistant_grid(double min, double max, std::size_t n, AxisLabel label = AxisLabel::Z1);
KineticOperator1D build_kinetic(const Grid1D& grid, double inverse_mass_prefactor);

/// Row d of the first-derivative matrix: f'(x_d) = sum_j row[j] f(x_j), using the
/// same spectral representation as the kinetic operator.
std::vector<double> first_derivative_row(const Grid1D& grid, std::size_t node);

}  // namespace hhdyn
