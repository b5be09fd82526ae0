#include "hhdyn/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace hhdyn {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int& requested_threads() {
  static int n = 1;
  return n;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void set_fft_threads(int threads) {
  std::lock_guard lock(planner_mutex());
  static bool initialized = false;
  if (!initialized) {
    fftw_init_threads();
    initialized = true;
  }
  requested_threads() = std::max(1, threads);
  fftw_plan_with_nthreads(requested_threads());
}

SpectralTransform::SpectralTransform(Shape3 shape, std::vector<int> axes)
    : shape_(shape), axes_(std::move(axes)), scratch_(shape.size()) {
  std::sort(axes_.begin(), axes_.end());
  if (axes_.empty()) throw std::invalid_argument("SpectralTransform needs at least one axis");

  std::vector<fftw_iodim> dims;
  std::vector<fftw_iodim> batch;
  for (int a = 0; a < 3; ++a) {
    fftw_iodim d{static_cast<int>(shape_.n[a]), static_cast<int>(shape_.stride(a)),
                 static_cast<int>(shape_.stride(a))};
    if (std::find(axes_.begin(), axes_.end(), a) != axes_.end()) {
      dims.push_back(d);
    } else if (shape_.n[a] > 1) {
      batch.push_back(d);
    }
  }

  std::lock_guard lock(planner_mutex());
  auto* buf = as_fftw(scratch_.data());
  const unsigned flags = FFTW_ESTIMATE;
  forward_plan_ = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                     static_cast<int>(batch.size()), batch.data(), buf, buf,
                                     FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_guru_dft(static_cast<int>(dims.size()), dims.data(),
                                      static_cast<int>(batch.size()), batch.data(), buf, buf,
                                      FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW planning failed");
  plan_alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buf));
}

SpectralTransform::~SpectralTransform() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void SpectralTransform::forward(cplx* data) const { execute(forward_plan_, data); }
void SpectralTransform::backward(cplx* data) const { execute(backward_plan_, data); }

void SpectralTransform::execute(void* plan, cplx* data) const {
  auto p = static_cast<fftw_plan>(plan);
  if (fftw_alignment_of(reinterpret_cast<double*>(data)) == plan_alignment_) {
    fftw_execute_dft(p, as_fftw(data), as_fftw(data));
    return;
  }
  // Caller memory with a different alignment (e.g. a numpy array) goes through scratch.
  std::memcpy(scratch_.data(), data, shape_.size() * sizeof(cplx));
  fftw_execute_dft(p, as_fftw(scratch_.data()), as_fftw(scratch_.data()));
  std::memcpy(data, scratch_.data(), shape_.size() * sizeof(cplx));
}

}  // namespace hhdyn
