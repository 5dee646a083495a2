#pragma once

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "sphcs/types.hpp"

namespace sphcs {

// FFTW planning is not thread safe; executions on distinct plans are.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// In-place multi-dimensional complex FFT of a cube with `side` points per
/// axis, `dims` in {2, 3}. Unnormalized FFTW conventions: forward applies
/// e^{-i 2 pi <k, n> / L}, backward e^{+i 2 pi <k, n> / L}.
class Fft {
 public:
  Fft(int side, int dims) : side_(side), dims_(dims) {
    std::int64_t n = 1;
    for (int i = 0; i < dims; ++i) n *= side;
    buffer_.assign(n, cplx(0.0));
    auto* data = reinterpret_cast<fftw_complex*>(buffer_.data());
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (dims == 2) {
      fwd_ = fftw_plan_dft_2d(side, side, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(side, side, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_3d(side, side, side, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_3d(side, side, side, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }

  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::vector<cplx>& buffer() { return buffer_; }

  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  int side_;
  int dims_;
  std::vector<cplx> buffer_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

}  // namespace sphcs
