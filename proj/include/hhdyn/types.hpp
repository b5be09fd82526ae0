#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace hhdyn {

using cplx = std::complex<double>;

/// Allocator handing out 64-byte aligned blocks so FFTW plans made on one
/// buffer can execute on any other buffer of the same kind.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() noexcept = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

/// Extents of a row-major (R, z1, z2) array; the last index is fastest.
struct Shape3 {
  std::array<std::size_t, 3> n{1, 1, 1};

  std::size_t size() const { return n[0] * n[1] * n[2]; }
  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int a = 2; a > axis; --a) s *= n[a];
    return s;
  }
  std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2) const {
    return (i0 * n[1] + i1) * n[2] + i2;
  }
  bool operator==(const Shape3&) const = default;
};

}  // namespace hhdyn
