#include "rdemod/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rdemod {

void require_bandlimit(std::size_t w) {
  if (w < 2 || w % 2 != 0)
    throw std::domain_error("bandlimit W must be even and >= 2, got " + std::to_string(w));
}

std::size_t freq_to_column(long omega, std::size_t w) {
  require_bandlimit(w);
  const long half = static_cast<long>(w / 2);
  if (omega > half || omega <= -half)
    throw std::domain_error("frequency " + std::to_string(omega) + " outside band for W=" +
                            std::to_string(w));
  return omega >= 0 ? static_cast<std::size_t>(omega)
                    : static_cast<std::size_t>(static_cast<long>(w) + omega);
}

long column_to_freq(std::size_t column, std::size_t w) {
  require_bandlimit(w);
  if (column >= w) throw std::domain_error("column index out of range");
  return column <= w / 2 ? static_cast<long>(column)
                         : static_cast<long>(column) - static_cast<long>(w);
}

std::vector<std::size_t> AmplitudeVector::support() const {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    if (coeffs[i] != std::complex<double>(0.0, 0.0)) out.push_back(static_cast<std::size_t>(i));
  return out;
}

std::complex<double> bracket(long omega, std::size_t w) {
  if (omega == 0) return {1.0 / static_cast<double>(w), 0.0};
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(omega) / static_cast<double>(w);
  const std::complex<double> numer(1.0 - std::cos(theta), std::sin(theta));
  return numer / std::complex<double>(0.0, 2.0 * std::numbers::pi * static_cast<double>(omega));
}

AmplitudeVector attenuate(const ToneAmplitudes& a) {
  const std::size_t w = static_cast<std::size_t>(a.coeffs.size());
  require_bandlimit(w);
  AmplitudeVector s{Eigen::VectorXcd(a.coeffs.size())};
  for (std::size_t c = 0; c < w; ++c) s.coeffs[c] = a.coeffs[c] * bracket(column_to_freq(c, w), w);
  return s;
}

ToneAmplitudes prewhiten(const AmplitudeVector& s) {
  const std::size_t w = s.w();
  require_bandlimit(w);
  ToneAmplitudes a{Eigen::VectorXcd(s.coeffs.size())};
  for (std::size_t c = 0; c < w; ++c) a.coeffs[c] = s.coeffs[c] / bracket(column_to_freq(c, w), w);
  return a;
}

std::complex<double> eval_multitone(const AmplitudeVector& s, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("eval_multitone: t must lie in [0, 1)");
  const std::size_t w = s.w();
  const ToneAmplitudes a = prewhiten(s);
  std::complex<double> f(0.0, 0.0);
  for (std::size_t c = 0; c < w; ++c) {
    if (a.coeffs[c] == std::complex<double>(0.0, 0.0)) continue;
    const double omega = static_cast<double>(column_to_freq(c, w));
    f += a.coeffs[c] * std::polar(1.0, -2.0 * std::numbers::pi * omega * t);
  }
  return f;
}

AmplitudeVector draw_model_a(std::size_t w, std::size_t k, Rng& rng) {
  require_bandlimit(w);
  if (k > w) throw std::domain_error("draw_model_a: K exceeds W");
  std::vector<std::size_t> cols(w);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  // Partial Fisher-Yates: the first k slots are a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(cols[i], cols[i + rng.below(w - i)]);
  AmplitudeVector s = AmplitudeVector::zeros(w);
  for (std::size_t i = 0; i < k; ++i) s.coeffs[cols[i]] = rng.unit_phase();
  return s;
}

AmplitudeVector draw_compressible(std::size_t w, double p, Rng& rng) {
  require_bandlimit(w);
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("draw_compressible: p must lie in (0, 1)");
  std::vector<std::size_t> cols(w);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  for (std::size_t i = 0; i + 1 < w; ++i) std::swap(cols[i], cols[i + rng.below(w - i)]);
  AmplitudeVector s = AmplitudeVector::zeros(w);
  for (std::size_t rank = 0; rank < w; ++rank) {
    const double mag = std::pow(static_cast<double>(rank + 1), -1.0 / p);
    s.coeffs[cols[rank]] = mag * rng.unit_phase();
  }
  return s;
}

bool is_compressible(const AmplitudeVector& s, double p, double rel_tol) {
  std::vector<double> mags(s.w());
  for (std::size_t i = 0; i < s.w(); ++i) mags[i] = std::abs(s.coeffs[i]);
  std::sort(mags.begin(), mags.end(), std::greater<>());
  for (std::size_t k = 0; k < mags.size(); ++k)
    if (mags[k] > std::pow(static_cast<double>(k + 1), -1.0 / p) * (1.0 + rel_tol)) return false;
  return true;
}

SparseApproximation best_k_approx(const AmplitudeVector& s, std::size_t k) {
  const std::size_t w = s.w();
  if (k > w) throw std::domain_error("best_k_approx: K exceeds W");
  std::vector<std::size_t> order(w);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(s.coeffs[a]) > std::abs(s.coeffs[b]);
  });
  SparseApproximation out{AmplitudeVector::zeros(w)};
  double l1 = 0.0, l2 = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t c = order[i];
    if (i < k) {
      out.head.coeffs[c] = s.coeffs[c];
    } else {
      const double m = std::abs(s.coeffs[c]);
      l1 += m;
      l2 += m * m;
    }
  }
  out.tail_l1 = l1;
  out.tail_l2 = std::sqrt(l2);
  return out;
}

}  // namespace rdemod
