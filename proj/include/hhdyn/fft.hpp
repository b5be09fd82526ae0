#pragma once

#include <memory>
#include <vector>

#include "hhdyn/types.hpp"

namespace hhdyn {

/// Unnormalized in-place complex DFT over a subset of the axes of a Shape3
/// array, batched over the remaining axes. Wraps an FFTW guru plan pair.
class SpectralTransform {
 public:
  SpectralTransform(Shape3 shape, std::vector<int> axes);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  void forward(cplx* data) const;
  void backward(cplx* data) const;

  const Shape3& shape() const { return shape_; }
  const std::vector<int>& axes() const { return axes_; }

 private:
  void execute(void* plan, cplx* data) const;

  Shape3 shape_;
  std::vector<int> axes_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
  int plan_alignment_ = 0;
  mutable ComplexBuffer scratch_;
};

/// Sets the thread count used by subsequently created FFT plans.
void set_fft_threads(int threads);

}  // namespace hhdyn
