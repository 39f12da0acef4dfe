#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace dtl;
using dtl::test::q;
using dtl::test::Rng;

namespace {

using Seq = PolyTailSequence<Rational>;

// Kernels printed in closed form for j <= 3.
Rational printed_kernel(int j, long n) {
  const Rational a = Rational(n < 0 ? -n : n);
  switch (j) {
    case -1: return q(1, 2);
    case 0: return -a / 2;
    case 1: return a * a / 4 - q(1, 16);
    case 2: return -a * a * a / 12 + a / 12;
    case 3: return a * a * a * a / 48 - q(5, 96) * a * a + q(3, 256);
  }
  return 0;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("free_resolvent") {
  TEST_CASE("printed kernels") {
    for (int j = -1; j <= 3; ++j)
      for (long n = -10; n <= 10; ++n) CHECK(g0_kernel<Rational>(j, n) == printed_kernel(j, n));
    CHECK(g0_kernel<Rational>(2, 2) == q(-1, 2));
    CHECK(g0_kernel<Rational>(-1, 7) == q(1, 2));
    CHECK(g0_kernel<Rational>(3, 0) == q(3, 256));
    CHECK(g0_kernel<Rational>(-2, 3) == 0);
  }

  TEST_CASE("kernels agree with the direct closed-form expansion") {
    for (int j = -1; j <= 7; ++j)
      for (long n = 0; n <= 6; ++n) CHECK(g0_kernel<Rational>(j, n) == dtl::test::kernel_series_oracle(j, n));
  }

  TEST_CASE("G_j^0 has degree j + 1 in |n|") {
    for (int j = -1; j <= 9; ++j) CHECK(kernel_polynomial(j).size() == static_cast<std::size_t>(j + 2));
  }

  TEST_CASE("r0_point against Fourier quadrature") {
    CHECK(r0_point(1.0, 0) == doctest::Approx(0.44721360).epsilon(1e-8));
    CHECK(r0_point(1.0, 1) == doctest::Approx(0.17082039).epsilon(1e-7));
    for (double kappa : {1.0, 0.25, 1.0 / 16})
      for (long n : {0L, 1L, 3L, -5L, 12L}) CHECK(std::abs(r0_point(kappa, n) - dtl::test::fourier_r0(kappa, n)) < 1e-10);
    CHECK_THROWS_AS(r0_point(0.0, 0), Error);
    CHECK_THROWS_AS(r0_point(-1.0, 0), Error);
  }

  TEST_CASE("kappa R0 tends to 1/2") {
    for (long n : {0L, 4L, -9L}) CHECK(std::abs(1e-7 * r0_point(1e-7, n) - 0.5) < 1e-6);
  }

  TEST_CASE("resolvent identity for the free column") {
    for (double kappa : {1.0, 0.25, 1.0 / 16})
      for (long n = -19; n <= 19; ++n) {
        const double h = 2 * r0_point(kappa, n) - r0_point(kappa, n + 1) - r0_point(kappa, n - 1) +
                         kappa * kappa * r0_point(kappa, n);
        CHECK(std::abs(h - (n == 0 ? 1.0 : 0.0)) < 1e-10);
      }
  }

  TEST_CASE("truncated kernel series has remainder order N + 1") {
    for (long n : {0L, 1L, 5L})
      for (int N = 0; N <= 4; ++N) {
        std::vector<double> lx, ly;
        for (int k = 4; k <= 14; ++k) {
          const Real50 kappa = Real50(1) / Real50(1L << k);
          Real50 sum = 0, power = 1 / kappa;
          for (int j = -1; j <= N; ++j) {
            sum += g0_kernel<Real50>(j, n) * power;
            power *= kappa;
          }
          const Real50 rest = abs(r0_point(kappa, n) - sum);
          lx.push_back(std::log(to_double(kappa)));
          ly.push_back(std::log(to_double(rest)));
        }
        CHECK(fit_slope(lx, ly) >= N + 0.8);
      }
  }

  TEST_CASE("apply_g0 examples") {
    const Seq a = apply_g0(0, CompactSequence<Rational>::unit(0));
    for (long n = -10; n <= 10; ++n) CHECK(a[n] == -Rational(std::labs(n)) / 2);
    const Seq s = apply_g0(0, CompactSequence<Rational>(-1, {q(-1), q(0), q(1)}));
    for (long n = -10; n <= 10; ++n) CHECK(s[n] == sign_sequence<Rational>()[n]);
    const Seq c = apply_g0(0, CompactSequence<Rational>(-1, {q(1), q(-2), q(1)}));
    CHECK(c.compact());
    CHECK(c == Seq(CompactSequence<Rational>(0, {q(-1)})));
  }

  TEST_CASE("apply_g0 equals the direct convolution, tails included") {
    Rng rng(21);
    for (int it = 0; it < 20; ++it) {
      const int j = static_cast<int>(rng.integer(-1, 4));
      const CompactSequence<Rational> x = rng.nonzero_compact(-4, 4);
      const Seq g = apply_g0(j, x);
      CHECK(g.tail_degree() <= j + 1);
      for (long n = -30; n <= 30; n += 3) {
        Rational direct = 0;
        for (long k = x.first(); k <= x.last(); ++k) direct += g0_kernel<Rational>(j, n - k) * x[k];
        CHECK(g[n] == direct);
      }
    }
  }

  TEST_CASE("H0 G0^0 x = x") {
    Rng rng(22);
    for (int it = 0; it < 200; ++it) {
      const CompactSequence<Rational> x = rng.nonzero_compact(-6, 6);
      CHECK(apply_h0(apply_g0(0, x)) == Seq(x));
    }
  }

  TEST_CASE("G0^0 x is compact exactly when both moments vanish") {
    Rng rng(23);
    for (int it = 0; it < 100; ++it) {
      const CompactSequence<Rational> x =
          it % 2 == 0 ? dtl::test::moment_free(rng, -4, 3) : rng.nonzero_compact(-4, 4);
      const bool moments_zero =
          pair(ones<Rational>(), Seq(x)) == 0 && pair(identity_sequence<Rational>(), Seq(x)) == 0;
      CHECK(apply_g0(0, x).compact() == moments_zero);
    }
  }

  TEST_CASE("moment lemma") {
    Rng rng(24);
    for (int it = 0; it < 100; ++it) {
      const auto x = dtl::test::moment_free(rng, -5, 2), y = dtl::test::moment_free(rng, -2, 5);
      CHECK(pair(x, apply_g0(2, y)) == -pair(apply_g0(0, x), apply_g0(0, y)));
    }
  }

  TEST_CASE("coefficient windows are symmetric Toeplitz") {
    const Mat<Rational> w = coefficient_window<Rational>(1, -3, 3);
    CHECK(w == w.transpose());
    CHECK(w(0, 2) == g0_kernel<Rational>(1, 2));
  }
}
