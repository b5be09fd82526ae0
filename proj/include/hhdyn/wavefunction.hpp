#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "hhdyn/grids.hpp"
#include "hhdyn/types.hpp"

namespace hhdyn {

/// Complex amplitudes over (R, z1, z2), R slowest and z2 fastest.
class Wavefunction {
 public:
  explicit Wavefunction(ProductGrid grid);

  const ProductGrid& grid() const { return grid_; }
  Shape3 shape() const { return shape_; }
  std::span<cplx> data() { return amplitudes_; }
  std::span<const cplx> data() const { return amplitudes_; }
  cplx& at(std::size_t ir, std::size_t i1, std::size_t i2) { return amplitudes_[shape_.index(ir, i1, i2)]; }
  const cplx& at(std::size_t ir, std::size_t i1, std::size_t i2) const {
    return amplitudes_[shape_.index(ir, i1, i2)];
  }

  /// sum |psi|^2 w_R w_z1 w_z2
  double norm_squared() const;
  double norm() const;
  void normalize();
  bool all_finite() const;

  /// <this, other> with quadrature weights.
  cplx inner(const Wavefunction& other) const;

 private:
  ProductGrid grid_;
  Shape3 shape_;
  ComplexBuffer amplitudes_;
};

/// Little-endian binary snapshot: "HHWF", version, extents, three (min, max, n)
/// grid descriptors, then (re, im) pairs. Only equidistant axes are representable;
/// frozen nuclei are written as the degenerate descriptor (R, R, 1).
void write_snapshot(const Wavefunction& psi, const std::filesystem::path& path);
Wavefunction read_snapshot(const std::filesystem::path& path);

inline constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace hhdyn
