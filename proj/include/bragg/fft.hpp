#pragma once

#include <complex>
#include <span>

namespace bragg {

/// In-place 1D complex FFT pair backed by FFTW. Planning is serialized
/// through a global mutex; execution is thread-safe per instance.
/// forward: unnormalized exp(-i k x) sum, backward: exp(+i k x) sum.
class Fft {
 public:
  explicit Fft(int size);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
  Fft(Fft&& other) noexcept;
  Fft& operator=(Fft&& other) noexcept;

  int size() const { return size_; }
  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

 private:
  void release();

  int size_ = 0;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace bragg
