#include "rdemod/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace rdemod {

struct Fft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  // FFTW's planner is not reentrant.
  static std::mutex& mutex() {
    static std::mutex m;
    return m;
  }
};

namespace {

std::shared_ptr<const Fft::Plans> plans_for(std::size_t n) {
  static std::map<std::size_t, std::weak_ptr<const Fft::Plans>> cache;
  static std::mutex cache_mutex;
  std::lock_guard cache_lock(cache_mutex);
  if (auto it = cache.find(n); it != cache.end())
    if (auto alive = it->second.lock()) return alive;

  auto plans = std::make_shared<Fft::Plans>();
  {
    std::lock_guard lock(Fft::Plans::mutex());
    std::vector<std::complex<double>> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const int len = static_cast<int>(n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    plans->forward = fftw_plan_dft_1d(len, pa, pb, FFTW_FORWARD, flags);
    plans->backward = fftw_plan_dft_1d(len, pa, pb, FFTW_BACKWARD, flags);
  }
  if (!plans->forward || !plans->backward) throw std::runtime_error("Fft: planning failed");
  cache[n] = plans;
  return plans;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (n == 0) throw std::domain_error("Fft: zero length");
  plans_ = plans_for(n);
}

void Fft::forward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(plans_->forward,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft::backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(plans_->backward,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace rdemod
