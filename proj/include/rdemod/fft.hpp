#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace rdemod {

/// Unnormalized length-n DFT pair backed by FFTW.
///   forward:  X[k] = sum_j x[j] e^{-2 pi i jk/n}
///   backward: x[j] = sum_k X[k] e^{+2 pi i jk/n}
/// Plans are shared per length; execution is safe from several threads.
class Fft {
 public:
  explicit Fft(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

  struct Plans;

 private:
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

}  // namespace rdemod
