#include "rdemod/demodulator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rdemod/errors.hpp"
#include "rdemod/simd/kernels.hpp"
#include "unit_root.hpp"

namespace rdemod {

ChippingSequence::ChippingSequence(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
  for (std::int8_t e : signs_)
    if (e != 1 && e != -1) throw std::domain_error("chipping entries must be +1 or -1");
}

ChippingSequence draw_chipping(std::size_t w, Rng& rng) {
  if (w < 2) throw std::domain_error("draw_chipping: W must be >= 2");
  std::vector<std::int8_t> eps(w);
  for (auto& e : eps) e = static_cast<std::int8_t>(rng.rademacher());
  return ChippingSequence(std::move(eps));
}

AccumulatorMatrix::AccumulatorMatrix(std::size_t r, std::size_t w) : w_(w) {
  if (r < 1 || r > w)
    throw std::domain_error("accumulator needs 1 <= R <= W (R=" + std::to_string(r) +
                            ", W=" + std::to_string(w) + ")");
  rows_.resize(r);
  // Time measured in units of 1/(W R): chip j covers [jR, (j+1)R), window m
  // covers [mW, (m+1)W). Overlaps are therefore exact integers.
  for (std::size_t j = 0; j < w; ++j) {
    const std::size_t lo = j * r, hi = (j + 1) * r;
    for (std::size_t m = lo / w; m < r && m * w < hi; ++m) {
      const std::size_t a = std::max(lo, m * w), b = std::min(hi, (m + 1) * w);
      if (b <= a) continue;
      const std::size_t overlap = b - a;
      const double weight =
          overlap == r ? 1.0 : std::sqrt(static_cast<double>(overlap) / static_cast<double>(r));
      rows_[m].push_back({j, weight});
    }
  }
}

Eigen::MatrixXd AccumulatorMatrix::dense() const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows()),
                                            static_cast<Eigen::Index>(w_));
  for (std::size_t m = 0; m < rows(); ++m)
    for (const Entry& e : rows_[m]) h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(e.column)) = e.weight;
  return h;
}

Eigen::VectorXcd AccumulatorMatrix::apply(const Eigen::VectorXcd& x) const {
  if (static_cast<std::size_t>(x.size()) != w_) throw std::domain_error("H apply: length mismatch");
  Eigen::VectorXcd y(static_cast<Eigen::Index>(rows()));
  if (divisible()) {
    simd::block_sum({x.data(), w_}, block(), {y.data(), rows()});
    return y;
  }
  for (std::size_t m = 0; m < rows(); ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (const Entry& e : rows_[m]) acc += e.weight * x[static_cast<Eigen::Index>(e.column)];
    y[static_cast<Eigen::Index>(m)] = acc;
  }
  return y;
}

Eigen::VectorXcd AccumulatorMatrix::apply_transpose(const Eigen::VectorXcd& y) const {
  if (static_cast<std::size_t>(y.size()) != rows())
    throw std::domain_error("H transpose: length mismatch");
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(w_));
  if (divisible()) {
    simd::block_spread({y.data(), rows()}, block(), {x.data(), w_});
    return x;
  }
  for (std::size_t m = 0; m < rows(); ++m)
    for (const Entry& e : rows_[m]) x[static_cast<Eigen::Index>(e.column)] += e.weight * y[static_cast<Eigen::Index>(m)];
  return x;
}

AccumulatorMatrix build_accumulator(std::size_t r, std::size_t w) { return AccumulatorMatrix(r, w); }

DemodulatorSystem::DemodulatorSystem(std::size_t w, std::size_t r, ChippingSequence chipping)
    : w_(w), chipping_(std::move(chipping)), h_(r, w), fft_(w) {
  require_bandlimit(w);
  if (chipping_.size() != w)
    throw std::domain_error("chipping length " + std::to_string(chipping_.size()) +
                            " does not match W=" + std::to_string(w));
  const double scale = 1.0 / std::sqrt(static_cast<double>(w));
  signs_.resize(w);
  for (std::size_t j = 0; j < w; ++j) signs_[j] = chipping_[j] * scale;
}

Eigen::VectorXcd DemodulatorSystem::forward(const Eigen::VectorXcd& s) const {
  if (static_cast<std::size_t>(s.size()) != w_) throw std::domain_error("apply: expected length W");
  Eigen::VectorXcd x(s.size());
  fft_.forward(s.data(), x.data());
  simd::real_scale(signs_, {x.data(), w_}, {x.data(), w_});
  return h_.apply(x);
}

Eigen::VectorXcd DemodulatorSystem::adjoint(const Eigen::VectorXcd& y) const {
  if (static_cast<std::size_t>(y.size()) != r())
    throw std::domain_error("apply_adjoint: expected length R");
  Eigen::VectorXcd x = h_.apply_transpose(y);
  simd::real_scale(signs_, {x.data(), w_}, {x.data(), w_});
  Eigen::VectorXcd s(x.size());
  fft_.backward(x.data(), s.data());
  return s;
}

SampleVector DemodulatorSystem::apply(const AmplitudeVector& s) const { return {forward(s.coeffs)}; }

AmplitudeVector DemodulatorSystem::apply_adjoint(const SampleVector& y) const {
  return {adjoint(y.coeffs)};
}

Eigen::VectorXcd DemodulatorSystem::column(std::size_t c) const {
  if (c >= w_) throw std::domain_error("column index out of range");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(r()));
  for (std::size_t m = 0; m < r(); ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (const auto& e : h_.row(m))
      acc += e.weight * signs_[e.column] *
             detail::unit_root(static_cast<long long>(e.column * c), w_);
    out[static_cast<Eigen::Index>(m)] = acc;
  }
  return out;
}

Eigen::MatrixXcd DemodulatorSystem::columns(std::span<const std::size_t> support) const {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(r()), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = column(support[i]);
  return out;
}

Eigen::MatrixXcd DemodulatorSystem::dense() const {
  if (w_ > kDenseLimit)
    throw std::length_error("dense Phi refused above W=" + std::to_string(kDenseLimit));
  std::vector<std::complex<double>> roots(w_);
  for (std::size_t k = 0; k < w_; ++k) roots[k] = detail::unit_root(static_cast<long long>(k), w_);
  const auto rows = static_cast<Eigen::Index>(r());
  Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(rows, static_cast<Eigen::Index>(w_));
  for (std::size_t c = 0; c < w_; ++c) {
    for (std::size_t m = 0; m < r(); ++m) {
      std::complex<double> acc(0.0, 0.0);
      for (const auto& e : h_.row(m)) acc += e.weight * signs_[e.column] * roots[(e.column * c) % w_];
      phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return phi;
}

DemodulatorSystem build_system(std::size_t w, std::size_t r, ChippingSequence chipping) {
  return DemodulatorSystem(w, r, std::move(chipping));
}

SampleVector sample_continuous(const AmplitudeVector& s, const ChippingSequence& chipping,
                               std::size_t r) {
  const std::size_t w = s.w();
  require_bandlimit(w);
  if (chipping.size() != w) throw std::domain_error("sample_continuous: chipping length != W");
  if (r < 1 || r > w) throw std::domain_error("sample_continuous: need 1 <= R <= W");
  if (w % r != 0) throw Unsupported("sample_continuous requires R to divide W");

  const ToneAmplitudes a = prewhiten(s);
  const double wd = static_cast<double>(w);
  // x_j = integral of f over chip j, from the antiderivative of each tone.
  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(w));
  for (std::size_t c = 0; c < w; ++c) {
    const std::complex<double> amp = a.coeffs[static_cast<Eigen::Index>(c)];
    if (amp == std::complex<double>(0.0, 0.0)) continue;
    const double omega = static_cast<double>(column_to_freq(c, w));
    for (std::size_t j = 0; j < w; ++j) {
      std::complex<double> integral;
      if (omega == 0.0) {
        integral = 1.0 / wd;
      } else {
        const double t0 = static_cast<double>(j) / wd, t1 = static_cast<double>(j + 1) / wd;
        const auto e0 = std::polar(1.0, -2.0 * std::numbers::pi * omega * t0);
        const auto e1 = std::polar(1.0, -2.0 * std::numbers::pi * omega * t1);
        integral = (e0 - e1) / std::complex<double>(0.0, 2.0 * std::numbers::pi * omega);
      }
      x[static_cast<Eigen::Index>(j)] += amp * integral;
    }
  }
  const std::size_t block = w / r;
  const double scale = 1.0 / std::sqrt(wd);
  SampleVector y{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(r))};
  for (std::size_t m = 0; m < r; ++m) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = m * block; j < (m + 1) * block; ++j)
      acc += static_cast<double>(chipping[j]) * x[static_cast<Eigen::Index>(j)];
    y.coeffs[static_cast<Eigen::Index>(m)] = acc * scale;
  }
  return y;
}

}  // namespace rdemod
