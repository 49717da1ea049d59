#include "rdemod/window.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rdemod/fft.hpp"

namespace rdemod {

namespace {

double smoothstep(double x, std::size_t n) {
  double sum = 0.0, binom = 1.0, power = 1.0;
  for (std::size_t j = 0; j <= n; ++j) {
    if (j > 0) binom = binom * static_cast<double>(n + j) / static_cast<double>(j);
    sum += binom * power;
    power *= 1.0 - x;
  }
  return std::pow(x, static_cast<double>(n + 1)) * sum;
}

// Relative best-K errors from squared magnitudes, for each K in ks.
std::vector<double> best_k_errors(std::vector<double> energy, const std::vector<std::size_t>& ks) {
  std::sort(energy.begin(), energy.end(), std::greater<>());
  // tail[i] = sum of energy[i..]; accumulated from the small end.
  std::vector<double> tail(energy.size() + 1, 0.0);
  for (std::size_t i = energy.size(); i-- > 0;) tail[i] = tail[i + 1] + energy[i];
  std::vector<double> out;
  for (std::size_t k : ks) out.push_back(std::sqrt(tail[std::min(k, energy.size())] / tail[0]));
  return out;
}

double loglog_slope(const std::vector<std::size_t>& ks, const std::vector<double>& err) {
  const auto n = static_cast<double>(ks.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double x = std::log(static_cast<double>(ks[i])), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::size_t window_degree(std::size_t order) {
  if (order < 1) throw std::domain_error("window order must be >= 1");
  return order <= 3 ? 0 : (order - 3 + 1) / 2;
}

double window_value(double t, std::size_t degree) {
  if (t < 0.0 || t > 1.0) return 0.0;
  const double s = std::sin(std::numbers::pi * t);
  return smoothstep(s * s, degree);
}

double window_partition_sum(double t, std::size_t degree) {
  double sum = 0.0;
  const auto lo = static_cast<long>(std::floor(2.0 * (t - 1.0)));
  const auto hi = static_cast<long>(std::ceil(2.0 * t));
  for (long j = lo; j <= hi; ++j) sum += window_value(t - 0.5 * static_cast<double>(j), degree);
  return sum;
}

WindowResult window_demo(const WindowConfig& config) {
  const double wp = config.omega_prime;
  if (!std::isfinite(wp) || wp == std::round(wp))
    throw std::domain_error("window_demo: frequency must be non-integral");
  if (config.k_values.size() < 2) throw std::domain_error("window_demo: need at least two K values");
  for (std::size_t k : config.k_values)
    if (k == 0) throw std::domain_error("window_demo: K must be positive");
  const std::size_t n = config.samples;
  const std::size_t k_max = *std::max_element(config.k_values.begin(), config.k_values.end());
  if (n < 4 * k_max) throw std::domain_error("window_demo: too few samples for the largest K");

  WindowResult out;
  out.omega_prime = wp;
  out.order = config.order;
  out.degree = window_degree(config.order);

  // Raw tone on [0, 1): |c_k|^2 = sin^2(pi (w' - k)) / (pi (w' - k))^2, sum 1.
  // The K largest are the K integers nearest w', so only those are needed.
  const auto base = static_cast<long>(std::floor(wp));
  const auto reach = static_cast<long>(k_max) + 1;
  std::vector<double> raw;
  for (long k = base - reach; k <= base + reach; ++k) {
    const double d = wp - static_cast<double>(k);
    const double c = std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
    raw.push_back(c * c);
  }
  std::sort(raw.begin(), raw.end(), std::greater<>());
  std::vector<double> err_raw;
  for (std::size_t k : config.k_values) {
    double kept_total = 0.0;
    for (std::size_t i = 0; i < k; ++i) kept_total += raw[i];
    err_raw.push_back(std::sqrt(std::max(0.0, 1.0 - kept_total)));
  }

  std::vector<std::complex<double>> g(n), c(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(n);
    g[j] = window_value(t, out.degree) * std::polar(1.0, -2.0 * std::numbers::pi * wp * t);
  }
  Fft(n).backward(g.data(), c.data());
  std::vector<double> energy(n);
  for (std::size_t j = 0; j < n; ++j) energy[j] = std::norm(c[j]);
  const std::vector<double> err_win = best_k_errors(std::move(energy), config.k_values);

  for (std::size_t i = 0; i < config.k_values.size(); ++i)
    out.rows.push_back({config.k_values[i], err_raw[i], err_win[i]});
  out.slope_raw = loglog_slope(config.k_values, err_raw);
  out.slope_windowed = loglog_slope(config.k_values, err_win);
  return out;
}

}  // namespace rdemod
