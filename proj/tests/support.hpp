#pragma once

// Shared helpers for the test binaries: seeded random data and oracles that
// avoid the library code paths they are compared against.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dtl/io.hpp"

namespace dtl::test {

inline Rational q(long a, long b = 1) { return Rational(a, b); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "v_zero",          "b2_local_rank_one",      "b3_resonance_1",          "b3_resonance_2",
      "b4_eigenvalues_N1", "b4_eigenvalues_N3",    "b5_third_kind",           "case1_quasi_symmetric",
      "case2_rank_two",  "case3_nonlocal_rank_two", "b3_example1",            "rank_one_c1"};
  return names;
}

inline PotentialSpec fixture(const std::string& name) { return load_potential(name); }

class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(gen_); }
  // Entries in {-2..2} / {1,2,3}.
  Rational small_rational() { return Rational(integer(-2, 2), integer(1, 3)); }
  Rational nonzero_rational() {
    Rational r = 0;
    while (r == 0) r = small_rational();
    return r;
  }
  CompactSequence<Rational> compact(long lo, long hi) {
    std::vector<Rational> v;
    for (long n = lo; n <= hi; ++n) v.push_back(small_rational());
    return CompactSequence<Rational>(lo, std::move(v));
  }
  // Nonzero vector with support inside [lo, hi].
  CompactSequence<Rational> nonzero_compact(long lo, long hi) {
    while (true) {
      const long a = integer(lo, hi), b = integer(a, std::min(hi, a + 3));
      CompactSequence<Rational> x = compact(a, b);
      if (!x.empty()) return x;
    }
  }
  std::mt19937& engine() { return gen_; }

 private:
  std::mt19937 gen_;
};

// Rank <= 4, supports inside [-6, 6]; dependent draws are redrawn.
inline PotentialSpec random_potential(Rng& rng) {
  while (true) {
    PotentialSpec spec;
    const long rank = rng.integer(1, 4);
    for (long k = 0; k < rank; ++k) {
      PotentialTerm t;
      t.sign = rng.integer(0, 1) ? 1 : -1;
      t.vector = rng.nonzero_compact(-6, 6);
      spec.terms.push_back(t);
    }
    try {
      FactorizedPotential<Rational> check(spec);
      return spec;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DependentVectors) throw;
    }
  }
}

// Compact psi with H psi = 0: V = -<g,.> g / <g, psi> for g = H0 psi, plus a term orthogonal to psi.
inline PotentialSpec planted_bound_state(Rng& rng, PolyTailSequence<Rational>& psi_out) {
  while (true) {
    const CompactSequence<Rational> psi = rng.nonzero_compact(-3, 3);
    const CompactSequence<Rational> g = apply_h0(psi);
    const Rational s = pair(g, psi);
    if (s <= 0 || !exact_sqrt(s)) continue;
    PotentialSpec spec;
    spec.terms.push_back({-1, Rational(1), g * Rational(Rational(1) / *exact_sqrt(s))});
    const CompactSequence<Rational> u = rng.nonzero_compact(-5, 5);
    const CompactSequence<Rational> w = u - psi * Rational(pair(u, psi) / pair(psi, psi));
    if (!w.empty()) spec.terms.push_back({rng.integer(0, 1) ? 1 : -1, Rational(1), w});
    try {
      FactorizedPotential<Rational> check(spec);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DependentVectors) continue;
      throw;
    }
    psi_out = PolyTailSequence<Rational>(psi);
    return spec;
  }
}

// Multiplicative potential with rational-square magnitudes, so it stays exact.
inline PotentialSpec random_multiplicative(Rng& rng, int sites = 5) {
  std::map<long, Rational> values;
  for (int k = 0; k < sites; ++k) {
    const Rational root = rng.small_rational();
    values[rng.integer(-6, 6)] = (rng.integer(0, 1) ? 1 : -1) * root * root;
  }
  return multiplicative_potential(values);
}

// Compact x with <1, x> = <n, x> = 0, by correcting the first two entries.
inline CompactSequence<Rational> moment_free(Rng& rng, long lo, long hi) {
  while (true) {
    std::vector<Rational> v;
    for (long n = lo; n <= hi; ++n) v.push_back(rng.small_rational());
    Rational m0 = 0, m1 = 0;
    for (long n = lo + 2; n <= hi; ++n) {
      m0 += v[static_cast<std::size_t>(n - lo)];
      m1 += Rational(n) * v[static_cast<std::size_t>(n - lo)];
    }
    // x[lo] + x[lo+1] = -m0 and lo x[lo] + (lo+1) x[lo+1] = -m1.
    v[1] = -m1 + Rational(lo) * m0;
    v[0] = -m0 - v[1];
    CompactSequence<Rational> x(lo, std::move(v));
    if (!x.empty()) return x;
  }
}

// Coefficient of kappa^j in R0(kappa; n) from the closed form
// (s - kappa/2)^{2|n|} / (2 kappa s), s = sqrt(1 + kappa^2/4), expanded directly.
inline Rational kernel_series_oracle(int j, long n) {
  const std::size_t len = static_cast<std::size_t>(j) + 2;
  using Series = std::vector<Rational>;
  auto mul = [&](const Series& a, const Series& b) {
    Series out(len, Rational(0));
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t k = 0; i + k < len; ++k) out[i + k] += a[i] * b[k];
    return out;
  };
  Series s(len, Rational(0));
  Rational c = 1;  // binom(1/2, i) / 4^i
  for (std::size_t i = 0; 2 * i < len; ++i) {
    s[2 * i] = c;
    c = c * (Rational(1, 2) - Rational(static_cast<long>(i))) / Rational(4 * (static_cast<long>(i) + 1));
  }
  Series inv(len, Rational(0));  // 1 / s by long division
  inv[0] = 1;
  for (std::size_t k = 1; k < len; ++k) {
    Rational acc = 0;
    for (std::size_t i = 1; i <= k; ++i) acc += s[i] * inv[k - i];
    inv[k] = -acc;
  }
  Series base = s;
  if (len > 1) base[1] -= Rational(1, 2);
  Series power(len, Rational(0));
  power[0] = 1;
  for (long e = 0; e < 2 * std::labs(n); ++e) power = mul(power, base);
  const Series num = mul(power, inv);
  return num[len - 1] / 2;
}

// (2 pi)^{-1} int e^{i n theta} / (4 sin^2(theta/2) + kappa^2) d theta by the
// trapezoid rule, which converges geometrically for this periodic integrand.
inline double fourier_r0(double kappa, long n, int points = 40000) {
  const double pi = std::acos(-1.0);
  double acc = 0;
  for (int k = 0; k < points; ++k) {
    const double t = -pi + 2 * pi * (k + 0.5) / points;
    const double s = std::sin(t / 2);
    acc += std::cos(static_cast<double>(n) * t) / (4 * s * s + kappa * kappa);
  }
  return acc / points;
}

// Matrix of H = H0 + V on sites [lo, hi], with V from the dense rational kernel.
inline Mat<Rational> dense_h(const PotentialSpec& spec, long lo, long hi) {
  const Index n = hi - lo + 1;
  Mat<Rational> H = spec.dense_matrix(lo, hi);
  for (Index i = 0; i < n; ++i) {
    H(i, i) += 2;
    if (i > 0) H(i, i - 1) -= 1;
    if (i + 1 < n) H(i, i + 1) -= 1;
  }
  return H;
}

// 1 for n <= m, -1 for n > m.
inline PolyTailSequence<Rational> step_sequence(long m) {
  return PolyTailSequence<Rational>(m, {Rational(1), Rational(-1)}, Poly<Rational>::constant(1),
                                    Poly<Rational>::constant(-1));
}

// Smallest window holding every term vector; [0, 0] for V = 0.
inline std::pair<long, long> support(const PotentialSpec& spec) {
  if (spec.terms.empty()) return {0, 0};
  long lo = spec.terms.front().vector.first(), hi = spec.terms.front().vector.last();
  for (const auto& t : spec.terms) {
    lo = std::min(lo, t.vector.first());
    hi = std::max(hi, t.vector.last());
  }
  return {lo, hi};
}

}  // namespace dtl::test
