#pragma once

// Sequences on the integer lattice.
//
// CompactSequence: finitely supported, stored densely on [first, last] with
// nonzero end values.
//
// PolyTailSequence: a core window [lo, hi] plus polynomial tails,
//   x[n] = left(n)  for n <= lo,   x[n] = right(n)  for n >= hi,
// so core.front() == left(lo) and core.back() == right(hi) always hold.

#include <algorithm>
#include <vector>

#include "dtl/scalar.hpp"

namespace dtl {

// Polynomial in the lattice variable n; coeffs()[k] multiplies n^k.
// Trailing zero coefficients are never stored.
template <typename T>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<T> c) : c_(std::move(c)) { trim(); }
  static Poly constant(const T& a) { return Poly({a}); }
  static Poly affine(const T& a, const T& b) { return Poly({a, b}); }  // a + b n

  const std::vector<T>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  T coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : T(0); }

  T operator()(long n) const {
    T acc = 0;
    const T x = T(n);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  // q(n) = p(n + s)
  Poly shifted(long s) const {
    std::vector<T> out(c_.size(), T(0));
    const T shift = T(s);
    for (std::size_t k = 0; k < c_.size(); ++k) {
      T binom = 1, power = 1;
      // (n + s)^k = sum_i C(k,i) s^(k-i) n^i, walked from i = k downwards
      for (std::size_t i = k + 1; i-- > 0;) {
        out[i] += c_[k] * binom * power;
        binom = binom * T(static_cast<long>(i)) / T(static_cast<long>(k - i + 1));
        power *= shift;
      }
    }
    return Poly(std::move(out));
  }

  // q(n) = p(-n)
  Poly reflected() const {
    std::vector<T> out = c_;
    for (std::size_t k = 1; k < out.size(); k += 2) out[k] = -out[k];
    return Poly(std::move(out));
  }

  // q(n) = -(p(n+1) + p(n-1) - 2 p(n))
  Poly second_difference() const { return (shifted(1) + shifted(-1) - *this * T(2)) * T(-1); }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<T> out(std::max(a.c_.size(), b.c_.size()), T(0));
    for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] += b.c_[k];
    return Poly(std::move(out));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + b * T(-1); }
  friend Poly operator*(const Poly& a, const T& s) {
    std::vector<T> out = a.c_;
    for (auto& x : out) x *= s;
    return Poly(std::move(out));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<T> c_;
};

template <typename T>
class CompactSequence {
 public:
  CompactSequence() = default;
  CompactSequence(long first, std::vector<T> values) : first_(first), v_(std::move(values)) { trim(); }
  static CompactSequence unit(long n) { return CompactSequence(n, {T(1)}); }

  bool empty() const { return v_.empty(); }
  long first() const { return first_; }
  long last() const { return first_ + static_cast<long>(v_.size()) - 1; }
  const std::vector<T>& values() const { return v_; }

  T operator[](long n) const {
    if (n < first_ || n > last()) return T(0);
    return v_[static_cast<std::size_t>(n - first_)];
  }

  friend CompactSequence operator+(const CompactSequence& a, const CompactSequence& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const long lo = std::min(a.first(), b.first()), hi = std::max(a.last(), b.last());
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) out.push_back(a[n] + b[n]);
    return CompactSequence(lo, std::move(out));
  }
  friend CompactSequence operator*(const CompactSequence& a, const T& s) {
    std::vector<T> out = a.v_;
    for (auto& x : out) x *= s;
    return CompactSequence(a.first_, std::move(out));
  }
  friend CompactSequence operator-(const CompactSequence& a, const CompactSequence& b) {
    return a + b * T(-1);
  }
  friend bool operator==(const CompactSequence& a, const CompactSequence& b) {
    return a.first_ == b.first_ && a.v_ == b.v_;
  }

 private:
  void trim() {
    std::size_t lead = 0;
    while (lead < v_.size() && v_[lead] == 0) ++lead;
    if (lead == v_.size()) {
      v_.clear();
      first_ = 0;
      return;
    }
    std::size_t end = v_.size();
    while (v_[end - 1] == 0) --end;
    v_ = std::vector<T>(v_.begin() + static_cast<long>(lead), v_.begin() + static_cast<long>(end));
    first_ += static_cast<long>(lead);
  }
  long first_ = 0;
  std::vector<T> v_;
};

template <typename T>
class PolyTailSequence {
 public:
  PolyTailSequence() : lo_(0), core_{T(0)} {}

  // Checks the two overlap conditions; in floating mode the end values are
  // then snapped to the tails.
  PolyTailSequence(long lo, std::vector<T> core, Poly<T> left, Poly<T> right)
      : lo_(lo), core_(std::move(core)), left_(std::move(left)), right_(std::move(right)) {
    if (core_.empty()) fail(ErrorKind::DomainError, "empty core window");
    check_end(core_.front(), left_(lo_));
    check_end(core_.back(), right_(hi()));
    if constexpr (!is_exact_v<T>) {
      core_.front() = left_(lo_);
      core_.back() = right_(hi());
    }
    normalize();
  }

  PolyTailSequence(const CompactSequence<T>& x) {  // NOLINT: compact sequences embed implicitly
    if (x.empty()) {
      lo_ = 0;
      core_ = {T(0)};
      return;
    }
    lo_ = x.first() - 1;
    core_.reserve(x.values().size() + 2);
    core_.push_back(T(0));
    for (const auto& a : x.values()) core_.push_back(a);
    core_.push_back(T(0));
  }

  static PolyTailSequence polynomial(const Poly<T>& p) { return PolyTailSequence(0, {p(0)}, p, p); }

  long lo() const { return lo_; }
  long hi() const { return lo_ + static_cast<long>(core_.size()) - 1; }
  const std::vector<T>& core() const { return core_; }
  const Poly<T>& left() const { return left_; }
  const Poly<T>& right() const { return right_; }
  bool compact() const { return left_.is_zero() && right_.is_zero(); }
  int tail_degree() const { return std::max(left_.degree(), right_.degree()); }

  T operator[](long n) const {
    if (n <= lo_) return left_(n);
    if (n >= hi()) return right_(n);
    return core_[static_cast<std::size_t>(n - lo_)];
  }

  CompactSequence<T> to_compact() const {
    if (!compact()) fail(ErrorKind::DomainError, "sequence has nonzero tails");
    return CompactSequence<T>(lo_, core_);
  }

  friend PolyTailSequence operator+(const PolyTailSequence& a, const PolyTailSequence& b) {
    const long lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
    std::vector<T> core;
    core.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) core.push_back(a[n] + b[n]);
    return PolyTailSequence(lo, std::move(core), a.left_ + b.left_, a.right_ + b.right_, Unchecked{});
  }
  friend PolyTailSequence operator*(const PolyTailSequence& a, const T& s) {
    std::vector<T> core = a.core_;
    for (auto& x : core) x *= s;
    return PolyTailSequence(a.lo_, std::move(core), a.left_ * s, a.right_ * s, Unchecked{});
  }
  friend PolyTailSequence operator-(const PolyTailSequence& a, const PolyTailSequence& b) {
    return a + b * T(-1);
  }
  friend bool operator==(const PolyTailSequence& a, const PolyTailSequence& b) {
    if (!(a.left_ == b.left_) || !(a.right_ == b.right_)) return false;
    const long lo = std::min(a.lo(), b.lo()), hi = std::max(a.hi(), b.hi());
    for (long n = lo; n <= hi; ++n)
      if (a[n] != b[n]) return false;
    return true;
  }

  struct Unchecked {};
  // Caller guarantees the overlap conditions.
  PolyTailSequence(long lo, std::vector<T> core, Poly<T> left, Poly<T> right, Unchecked)
      : lo_(lo), core_(std::move(core)), left_(std::move(left)), right_(std::move(right)) {
    normalize();
  }

 private:
  static void check_end(const T& stored, const T& tail) {
    const T scale = std::max<T>(T(1), std::max(abs_of(stored), abs_of(tail)));
    if (vanishing<T>(stored - tail, scale) != Vanishing::Zero)
      fail(ErrorKind::DomainError, "core window disagrees with its polynomial tail");
  }

  // Shrinks the window while a tail already describes the next core value.
  // Floating values are left alone: rounding makes the shrink test meaningless.
  void normalize() {
    if constexpr (is_exact_v<T>) {
      std::size_t a = 0, b = core_.size() - 1;
      while (a < b && left_(lo_ + static_cast<long>(a) + 1) == core_[a + 1]) ++a;
      while (b > a && right_(lo_ + static_cast<long>(b) - 1) == core_[b - 1]) --b;
      if (a > 0 || b + 1 < core_.size()) {
        core_ = std::vector<T>(core_.begin() + static_cast<long>(a), core_.begin() + static_cast<long>(b) + 1);
        lo_ += static_cast<long>(a);
      }
    }
  }

  long lo_;
  std::vector<T> core_;
  Poly<T> left_, right_;
};

// Free Laplacian (H0 x)[n] = -(x[n+1] + x[n-1] - 2 x[n]).
template <typename T>
PolyTailSequence<T> apply_h0(const PolyTailSequence<T>& x) {
  const long lo = x.lo() - 1, hi = x.hi() + 1;
  std::vector<T> core;
  core.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (long n = lo; n <= hi; ++n) core.push_back(T(2) * x[n] - x[n + 1] - x[n - 1]);
  return PolyTailSequence<T>(lo, std::move(core), x.left().second_difference(),
                             x.right().second_difference(), typename PolyTailSequence<T>::Unchecked{});
}

template <typename T>
CompactSequence<T> apply_h0(const CompactSequence<T>& x) {
  if (x.empty()) return x;
  std::vector<T> out;
  for (long n = x.first() - 1; n <= x.last() + 1; ++n) out.push_back(T(2) * x[n] - x[n + 1] - x[n - 1]);
  return CompactSequence<T>(x.first() - 1, std::move(out));
}

// Bilinear pairing sum_n x[n] y[n] (real scalars, so no conjugation).
// Summable when on each side at least one of the two tails vanishes.
template <typename T>
T pair(const PolyTailSequence<T>& x, const PolyTailSequence<T>& y) {
  if ((!x.left().is_zero() && !y.left().is_zero()) || (!x.right().is_zero() && !y.right().is_zero()))
    fail(ErrorKind::NonSummable, "pairing of two sequences with growing tails on the same side");
  const long lo = std::min(x.lo(), y.lo()), hi = std::max(x.hi(), y.hi());
  T acc = 0;
  for (long n = lo; n <= hi; ++n) acc += x[n] * y[n];
  return acc;
}

template <typename T>
T pair(const CompactSequence<T>& x, const PolyTailSequence<T>& y) {
  T acc = 0;
  for (long n = x.first(); n <= x.last() && !x.empty(); ++n) acc += x[n] * y[n];
  return acc;
}

template <typename T>
T pair(const PolyTailSequence<T>& x, const CompactSequence<T>& y) {
  return pair(y, x);
}

template <typename T>
T pair(const CompactSequence<T>& x, const CompactSequence<T>& y) {
  if (x.empty() || y.empty()) return T(0);
  T acc = 0;
  for (long n = std::max(x.first(), y.first()); n <= std::min(x.last(), y.last()); ++n) acc += x[n] * y[n];
  return acc;
}

// (J x)[n] = (-1)^n x[n]; only compact sequences stay in the class.
template <typename T>
CompactSequence<T> j_conjugate(const CompactSequence<T>& x) {
  std::vector<T> out = x.values();
  for (std::size_t k = 0; k < out.size(); ++k)
    if ((x.first() + static_cast<long>(k)) % 2 != 0) out[k] = -out[k];
  return CompactSequence<T>(x.first(), std::move(out));
}

template <typename T>
CompactSequence<T> j_conjugate(const PolyTailSequence<T>& x) {
  return j_conjugate(x.to_compact());
}

// Largest magnitude among core values and tail coefficients; zero iff x == 0.
template <typename T>
T sup_coefficient(const PolyTailSequence<T>& x) {
  T out = 0;
  for (const auto& a : x.core()) out = std::max<T>(out, abs_of(a));
  for (const auto* p : {&x.left(), &x.right()})
    for (const auto& a : p->coeffs()) out = std::max<T>(out, abs_of(a));
  return out;
}

template <typename T>
PolyTailSequence<T> ones() {
  return PolyTailSequence<T>::polynomial(Poly<T>::constant(T(1)));
}

template <typename T>
PolyTailSequence<T> identity_sequence() {
  return PolyTailSequence<T>::polynomial(Poly<T>::affine(T(0), T(1)));
}

// sigma[n] = -1, 0, 1 for n < 0, n = 0, n > 0.
template <typename T>
PolyTailSequence<T> sign_sequence() {
  return PolyTailSequence<T>(-1, {T(-1), T(0), T(1)}, Poly<T>::constant(T(-1)), Poly<T>::constant(T(1)));
}

template <typename T>
PolyTailSequence<T> abs_sequence() {
  return PolyTailSequence<T>(0, {T(0)}, Poly<T>::affine(T(0), T(-1)), Poly<T>::affine(T(0), T(1)));
}

template <typename S, typename T>
CompactSequence<S> convert(const CompactSequence<T>& x, S (*f)(const T&)) {
  std::vector<S> out;
  for (const auto& a : x.values()) out.push_back(f(a));
  return CompactSequence<S>(x.first(), std::move(out));
}

}  // namespace dtl
