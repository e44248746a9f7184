#include "bragg/fft.hpp"

#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "bragg/errors.hpp"

namespace bragg {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

Fft::Fft(int size) : size_(size) {
  if (size < 2) throw ParameterError("FFT size must be >= 2");
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(size));
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(size, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                   FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_1d(size, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                    FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) {
    release();
    throw ParameterError("FFTW planning failed");
  }
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : size_(other.size_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

Fft& Fft::operator=(Fft&& other) noexcept {
  if (this != &other) {
    release();
    size_ = other.size_;
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void Fft::release() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  forward_plan_ = backward_plan_ = nullptr;
}

void Fft::forward(std::span<std::complex<double>> data) const {
  if (static_cast<int>(data.size()) != size_) throw ParameterError("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

void Fft::backward(std::span<std::complex<double>> data) const {
  if (static_cast<int>(data.size()) != size_) throw ParameterError("FFT size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace bragg
