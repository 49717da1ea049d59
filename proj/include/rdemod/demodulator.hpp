#pragma once

// The random demodulator as a linear map Phi = H D F from amplitude vectors
// (length W) to samples (length R):
//   F  unitary DFT, F[n, c] = e^{-2 pi i n w(c) / W} / sqrt(W)
//   D  diag(eps), the +-1 chipping sequence
//   H  integrate-and-dump accumulator, R x W

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rdemod/fft.hpp"
#include "rdemod/rng.hpp"
#include "rdemod/signal.hpp"

namespace rdemod {

/// Dense Phi (and anything W x W derived from it) is only built up to here.
inline constexpr std::size_t kDenseLimit = 4096;

class ChippingSequence {
 public:
  /// Throws std::domain_error if any entry is not +-1.
  explicit ChippingSequence(std::vector<std::int8_t> signs);

  std::size_t size() const { return signs_.size(); }
  int operator[](std::size_t j) const { return signs_[j]; }
  std::span<const std::int8_t> values() const { return signs_; }

 private:
  std::vector<std::int8_t> signs_;
};

/// i.i.d. Rademacher chips. Requires w >= 2.
ChippingSequence draw_chipping(std::size_t w, Rng& rng);

/// Accumulator H. When R divides W, row r sums the W/R consecutive chips
/// starting at rW/R. Otherwise a chip whose interval overlaps sampling window
/// r by a fraction lambda of its length contributes weight sqrt(lambda) to row
/// r, which keeps every column at unit l2 norm.
class AccumulatorMatrix {
 public:
  struct Entry {
    std::size_t column;
    double weight;
  };

  /// Throws std::domain_error unless 1 <= r <= w.
  AccumulatorMatrix(std::size_t r, std::size_t w);

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return w_; }
  bool divisible() const { return w_ % rows_.size() == 0; }
  /// Chips per row; only meaningful when divisible().
  std::size_t block() const { return w_ / rows_.size(); }
  std::span<const Entry> row(std::size_t r) const { return rows_[r]; }

  Eigen::MatrixXd dense() const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd apply_transpose(const Eigen::VectorXcd& y) const;

 private:
  std::size_t w_;
  std::vector<std::vector<Entry>> rows_;
};

AccumulatorMatrix build_accumulator(std::size_t r, std::size_t w);

/// Measurement vector y, length R.
struct SampleVector {
  Eigen::VectorXcd coeffs;
};

/// An immutable Phi. Cheap to copy; the FFT plan is shared.
class DemodulatorSystem {
 public:
  DemodulatorSystem(std::size_t w, std::size_t r, ChippingSequence chipping);

  std::size_t w() const { return w_; }
  std::size_t r() const { return h_.rows(); }
  const ChippingSequence& chipping() const { return chipping_; }
  const AccumulatorMatrix& accumulator() const { return h_; }

  /// y = Phi s in O(W log W).
  SampleVector apply(const AmplitudeVector& s) const;
  /// Phi^* y.
  AmplitudeVector apply_adjoint(const SampleVector& y) const;

  Eigen::VectorXcd forward(const Eigen::VectorXcd& s) const;
  Eigen::VectorXcd adjoint(const Eigen::VectorXcd& y) const;

  /// Column c of Phi, computed directly in O(W).
  Eigen::VectorXcd column(std::size_t c) const;
  /// Columns listed in `support`, as an R x |support| matrix.
  Eigen::MatrixXcd columns(std::span<const std::size_t> support) const;

  /// Dense R x W matrix with entries sum_{j ~ r} h_rj eps_j f_{j c}.
  /// Throws std::length_error when W exceeds kDenseLimit.
  Eigen::MatrixXcd dense() const;

 private:
  std::size_t w_;
  ChippingSequence chipping_;
  AccumulatorMatrix h_;
  std::vector<double> signs_;
  Fft fft_;
};

/// Throws std::domain_error on inconsistent dimensions.
DemodulatorSystem build_system(std::size_t w, std::size_t r, ChippingSequence chipping);

/// Integrate-and-dump samples of the continuous signal with amplitude vector
/// s, evaluated in closed form chip by chip. The physical R prefactor is
/// dropped and the result carries the 1/sqrt(W) of the unitary F, so it equals
/// apply(s) for the matching system. Requires R | W; otherwise throws
/// rdemod::Unsupported.
SampleVector sample_continuous(const AmplitudeVector& s, const ChippingSequence& chipping,
                               std::size_t r);

}  // namespace rdemod
