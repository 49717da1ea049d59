#include "rdemod/analyze.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace rdemod {

namespace {

void check_support(std::span<const std::size_t> support, std::size_t w) {
  std::vector<std::size_t> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::domain_error("support has repeated indices");
  if (!sorted.empty() && sorted.back() >= w) throw std::domain_error("support index out of range");
}

double hermitian_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(a, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  return std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()));
}

Eigen::MatrixXcd principal(const Eigen::MatrixXcd& x, std::span<const std::size_t> support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      sub(i, j) = x(static_cast<Eigen::Index>(support[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(support[static_cast<std::size_t>(j)]));
  return sub;
}

double binomial(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

}  // namespace

GramDeviation gram_deviation(const Eigen::MatrixXcd& phi) {
  GramDeviation g;
  g.x = phi.adjoint() * phi;
  g.x.diagonal().array() -= 1.0;
  const Eigen::Index w = g.x.cols();
  for (Eigen::Index j = 0; j < w; ++j) {
    for (Eigen::Index i = 0; i < w; ++i) {
      const double m = std::abs(g.x(i, j));
      g.max_abs = std::max(g.max_abs, m);
      if (i == j) {
        g.max_diagonal = std::max(g.max_diagonal, m);
      } else {
        g.max_off_diagonal = std::max(g.max_off_diagonal, m);
      }
    }
  }
  return g;
}

GramDeviation gram_deviation(const DemodulatorSystem& system) { return gram_deviation(system.dense()); }

double max_entry(const DemodulatorSystem& system) { return system.dense().cwiseAbs().maxCoeff(); }

double coherence(const GramDeviation& gram) { return gram.max_off_diagonal; }

double coherence(const DemodulatorSystem& system) { return coherence(gram_deviation(system)); }

double cumulative_coherence(const GramDeviation& gram, std::span<const std::size_t> support) {
  const auto w = static_cast<std::size_t>(gram.x.cols());
  check_support(support, w);
  if (support.size() >= w) throw std::domain_error("cumulative coherence needs a nonempty complement");
  std::vector<bool> inside(w, false);
  for (std::size_t c : support) inside[c] = true;
  double worst = 0.0;
  for (std::size_t a = 0; a < w; ++a) {
    if (inside[a]) continue;
    double acc = 0.0;
    for (std::size_t c : support) acc += std::norm(gram.x(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)));
    worst = std::max(worst, acc);
  }
  return std::sqrt(worst);
}

double cumulative_coherence(const DemodulatorSystem& system, std::span<const std::size_t> support) {
  return cumulative_coherence(gram_deviation(system), support);
}

double submatrix_condition(const GramDeviation& gram, std::span<const std::size_t> support) {
  check_support(support, static_cast<std::size_t>(gram.x.cols()));
  return hermitian_norm(principal(gram.x, support));
}

double submatrix_condition(const DemodulatorSystem& system, std::span<const std::size_t> support) {
  check_support(support, system.w());
  if (support.size() > system.r()) throw std::domain_error("submatrix_condition: |Omega| exceeds R");
  const Eigen::MatrixXcd cols = system.columns(support);
  Eigen::MatrixXcd dev = cols.adjoint() * cols;
  dev.diagonal().array() -= 1.0;
  return hermitian_norm(dev);
}

std::string_view to_string(RipMethod method) {
  return method == RipMethod::exhaustive ? "exhaustive" : "sampled";
}

std::vector<std::size_t> random_support(std::size_t w, std::size_t k, Rng& rng) {
  if (k > w) throw std::domain_error("random_support: K exceeds W");
  std::vector<std::size_t> cols(w);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) std::swap(cols[i], cols[i + rng.below(w - i)]);
  cols.resize(k);
  std::sort(cols.begin(), cols.end());
  return cols;
}

RipEstimate rip_estimate(const GramDeviation& gram, std::size_t n, std::size_t budget,
                         std::uint64_t seed) {
  const auto w = static_cast<std::size_t>(gram.x.cols());
  if (n == 0 || n > w) throw std::domain_error("rip_estimate: order must lie in [1, W]");
  RipEstimate est;
  est.order = n;
  if (binomial(w, n) <= static_cast<double>(budget)) {
    est.method = RipMethod::exhaustive;
    std::vector<std::size_t> comb(n);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      est.delta_hat = std::max(est.delta_hat, hermitian_norm(principal(gram.x, comb)));
      ++est.supports_tested;
      std::size_t i = n;
      while (i-- > 0 && comb[i] == w - n + i) {
      }
      if (i == static_cast<std::size_t>(-1)) break;
      ++comb[i];
      for (std::size_t j = i + 1; j < n; ++j) comb[j] = comb[j - 1] + 1;
    }
    return est;
  }
  est.method = RipMethod::sampled;
  Rng rng = Rng::derive(seed, "rip", n);
  for (std::size_t b = 0; b < budget; ++b) {
    const auto support = random_support(w, n, rng);
    est.delta_hat = std::max(est.delta_hat, hermitian_norm(principal(gram.x, support)));
    ++est.supports_tested;
  }
  return est;
}

RipEstimate rip_estimate(const DemodulatorSystem& system, std::size_t n, std::size_t budget,
                         std::uint64_t seed) {
  if (n > system.r()) throw std::domain_error("rip_estimate: order exceeds R");
  return rip_estimate(gram_deviation(system), n, budget, seed);
}

Eigen::MatrixXcd mean_gram_exhaustive(std::size_t w, std::size_t r) {
  require_bandlimit(w);
  if (w > 20) throw std::domain_error("mean_gram_exhaustive: W too large to enumerate");
  const std::size_t patterns = std::size_t{1} << w;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w));
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    std::vector<std::int8_t> eps(w);
    for (std::size_t j = 0; j < w; ++j) eps[j] = (mask >> j) & 1 ? -1 : 1;
    const Eigen::MatrixXcd phi = build_system(w, r, ChippingSequence(std::move(eps))).dense();
    sum += phi.adjoint() * phi;
  }
  return sum / static_cast<double>(patterns);
}

}  // namespace rdemod
