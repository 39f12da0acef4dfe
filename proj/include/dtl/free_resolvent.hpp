#pragma once

// Free resolvent R0(kappa) = (H0 + kappa^2)^{-1} and its Laurent coefficients
// G_j^0, j >= -1, in the convention z = -kappa^2.
//
// With kappa = 2 sinh(theta/2) the kernel is exp(-|n| theta) / (2 sinh theta),
// and d theta / d kappa = (1 + kappa^2/4)^{-1/2}. Expanding in kappa shows that
// G_j^0(n) is a polynomial of degree j+1 in |n| with rational coefficients.

#include <vector>

#include "dtl/scalar.hpp"
#include "dtl/sequence.hpp"

namespace dtl {

// Coefficients c_m, m = 0..j+1, with G_j^0(n) = sum_m c_m |n|^m. Empty for j < -1.
const std::vector<Rational>& kernel_polynomial(int j);

template <typename T>
T g0_kernel(int j, long n) {
  const auto& c = kernel_polynomial(j);
  const Rational t = Rational(n < 0 ? -n : n);
  Rational acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return from_rational<T>(acc);
}

// Closed form (sqrt(1 + kappa^2/4) - kappa/2)^{2|n|} / (2 kappa sqrt(1 + kappa^2/4)), kappa > 0.
template <typename R>
R r0_point(const R& kappa, long n) {
  using std::pow;
  using std::sqrt;
  if (!(kappa > 0)) fail(ErrorKind::DomainError, "kappa must be positive");
  const R s = sqrt(R(1) + kappa * kappa / 4);
  const long m = n < 0 ? -n : n;
  R base = s - kappa / 2, power = 1;
  for (long e = 2 * m; e > 0; e >>= 1) {
    if (e & 1) power *= base;
    base *= base;
  }
  return power / (2 * kappa * s);
}

// Convolution G_j^0 x for finitely supported x. The result has polynomial tails
// of degree <= j+1, valid from the edges of supp x outwards.
template <typename T>
PolyTailSequence<T> apply_g0(int j, const CompactSequence<T>& x) {
  if (x.empty() || j < -1) return PolyTailSequence<T>();
  std::vector<T> c;
  for (const auto& q : kernel_polynomial(j)) c.push_back(from_rational<T>(q));
  const Poly<T> p(c);
  const Poly<T> pr = p.reflected();
  Poly<T> right, left;
  for (long k = x.first(); k <= x.last(); ++k) {
    if (x[k] == 0) continue;
    right = right + p.shifted(-k) * x[k];   // p(n - k), n >= k
    left = left + pr.shifted(-k) * x[k];    // p(k - n), n <= k
  }
  std::vector<T> core;
  for (long n = x.first(); n <= x.last(); ++n) {
    T acc = 0;
    for (long k = x.first(); k <= x.last(); ++k) acc += g0_kernel<T>(j, n - k) * x[k];
    core.push_back(acc);
  }
  return PolyTailSequence<T>(x.first(), std::move(core), left, right);
}

// Matrix [G_j^0(n - m)] for n, m in [a, b].
template <typename T>
Mat<T> coefficient_window(int j, long a, long b) {
  const Index size = b - a + 1;
  Mat<T> out(size, size);
  for (Index r = 0; r < size; ++r)
    for (Index c = 0; c < size; ++c) out(r, c) = g0_kernel<T>(j, r - c);
  return out;
}

}  // namespace dtl
