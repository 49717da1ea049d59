#include <doctest.h>

#include <cmath>
#include <set>

#include "rdemod/rng.hpp"

using rdemod::Rng;

TEST_CASE("derived streams are pure functions of their labels") {
  Rng a = Rng::derive(42, "grid", 3, 7);
  Rng b = Rng::derive(42, "grid", 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

  std::set<std::uint64_t> seeds;
  seeds.insert(Rng::derive_seed(42, "grid", 3, 7));
  seeds.insert(Rng::derive_seed(42, "grid", 7, 3));
  seeds.insert(Rng::derive_seed(43, "grid", 3, 7));
  seeds.insert(Rng::derive_seed(42, "minrate", 3, 7));
  seeds.insert(Rng::derive_seed(42, "grid", 3));
  CHECK(seeds.size() == 5);
}

TEST_CASE("uniform and below stay in range") {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(rng.below(7) < 7);
  }
  CHECK_THROWS_AS(rng.below(0), std::domain_error);
}

TEST_CASE("below is close to uniform") {
  Rng rng(9);
  const int n = 60000;
  int counts[6] = {};
  for (int i = 0; i < n; ++i) ++counts[rng.below(6)];
  const double p = 1.0 / 6.0, sigma = std::sqrt(n * p * (1 - p));
  for (int c : counts) CHECK(std::abs(c - n * p) < 5 * sigma);
}

TEST_CASE("normal variates have unit variance and phases unit modulus") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0, sq = 0.0, csq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
    csq += std::norm(rng.complex_normal());
    CHECK(std::abs(std::abs(rng.unit_phase()) - 1.0) < 1e-15);
  }
  CHECK(std::abs(sum / n) < 0.015);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
  CHECK(std::abs(csq / n - 1.0) < 0.02);
}
