#pragma once

// Scalar layer. Every algorithm is a template over one of three scalars:
//   Rational  exact arithmetic, all vanishing tests are equality tests
//   double    binary64 with relative tolerances
//   Real50    50 decimal digits, used where binary64 cancellation would
//             swamp a remainder (slope fits at small kappa)
// Exact and floating values never mix inside one computation; conversions
// happen only through from_rational / to_double.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "dtl/error.hpp"

namespace dtl {
namespace mp = boost::multiprecision;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
using Real50 = mp::number<mp::cpp_bin_float<50>, mp::et_off>;
}  // namespace dtl

namespace Eigen {

template <>
struct NumTraits<dtl::Rational> : GenericNumTraits<dtl::Rational> {
  using Real = dtl::Rational;
  using NonInteger = dtl::Rational;
  using Literal = dtl::Rational;
  using Nested = dtl::Rational;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 150,
    MulCost = 100
  };
  static Real epsilon() { return 0; }
  static Real dummy_precision() { return 0; }
  static int digits10() { return 0; }
};

template <>
struct NumTraits<dtl::Real50> : GenericNumTraits<dtl::Real50> {
  using Real = dtl::Real50;
  using NonInteger = dtl::Real50;
  using Literal = dtl::Real50;
  using Nested = dtl::Real50;
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 30,
    MulCost = 50
  };
  static Real epsilon() { return std::numeric_limits<Real>::epsilon(); }
  static Real dummy_precision() { return 1000 * epsilon(); }
  static Real highest() { return (std::numeric_limits<Real>::max)(); }
  static Real lowest() { return std::numeric_limits<Real>::lowest(); }
  static Real infinity() { return std::numeric_limits<Real>::infinity(); }
  static Real quiet_NaN() { return std::numeric_limits<Real>::quiet_NaN(); }
  static int digits10() { return 50; }
};

}  // namespace Eigen

#include <Eigen/Dense>

namespace dtl {

using Index = Eigen::Index;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* mode = "exact";
};
template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr const char* mode = "float";
};
template <>
struct scalar_traits<Real50> {
  static constexpr bool exact = false;
  static constexpr const char* mode = "float50";
};

template <typename T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

// Floating vanishing rule: |x| <= kZeroRel * scale is zero, |x| > kBandRel * scale
// is nonzero, anything in between is reported as ambiguous.
inline constexpr double kZeroRel = 1e-9;
inline constexpr double kBandRel = 1e-6;

enum class Vanishing { Zero, Nonzero, Ambiguous };

Rational parse_rational(std::string_view text);
std::string to_string(const Rational& x);
std::string to_string(double x);
std::string to_string(const Real50& x);

// Exact square root of a nonnegative rational, if it is a rational square.
std::optional<Rational> exact_sqrt(const Rational& x);

template <typename T>
T from_rational(const Rational& q) {
  if constexpr (std::is_same_v<T, Rational>) {
    return q;
  } else if constexpr (std::is_same_v<T, double>) {
    return q.convert_to<double>();
  } else {
    return T(mp::numerator(q)) / T(mp::denominator(q));
  }
}

template <typename T>
double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

template <typename T>
Real50 to_real50(const T& x) {
  if constexpr (std::is_same_v<T, Rational>) {
    return from_rational<Real50>(x);
  } else {
    return Real50(x);
  }
}

template <typename T>
T abs_of(const T& x) {
  using std::abs;
  return abs(x);
}

// Square root of a nonnegative rational in scalar T. Exact mode demands a
// rational square.
template <typename T>
T sqrt_of(const Rational& w) {
  if (w < 0) fail(ErrorKind::DomainError, "square root of a negative weight");
  if constexpr (is_exact_v<T>) {
    auto r = exact_sqrt(w);
    if (!r) fail(ErrorKind::DomainError, "weight " + to_string(w) + " is not a rational square");
    return *r;
  } else {
    using std::sqrt;
    return sqrt(from_rational<T>(w));
  }
}

template <typename T>
Vanishing vanishing(const T& value, const T& scale) {
  if constexpr (is_exact_v<T>) {
    (void)scale;
    return value == 0 ? Vanishing::Zero : Vanishing::Nonzero;
  } else {
    const double s = std::max(1e-300, to_double(abs_of(scale)));
    const double a = to_double(abs_of(value));
    if (a <= kZeroRel * s) return Vanishing::Zero;
    if (a > kBandRel * s) return Vanishing::Nonzero;
    return Vanishing::Ambiguous;
  }
}

// Vanishing decision that refuses to guess inside the tolerance band.
template <typename T>
bool is_zero(const T& value, const T& scale, const char* what) {
  switch (vanishing(value, scale)) {
    case Vanishing::Zero:
      return true;
    case Vanishing::Nonzero:
      return false;
    default:
      fail(ErrorKind::FloatingAmbiguous, std::string(what) + " falls inside the tolerance band");
  }
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  using T = typename Derived::Scalar;
  T best = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) best = std::max<T>(best, abs_of<T>(m(i, j)));
  return best;
}

template <typename Derived>
bool all_zero(const Eigen::MatrixBase<Derived>& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

// Entrywise agreement: exact equality, or |a-b| <= kZeroRel * scale.
template <typename DA, typename DB>
bool nearly_equal(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b,
                  const typename DA::Scalar& scale) {
  using T = typename DA::Scalar;
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if constexpr (is_exact_v<T>) {
    (void)scale;
    return a == b;
  } else {
    if (a.size() == 0) return true;
    return vanishing<T>(max_abs(a - b), scale) == Vanishing::Zero;
  }
}

}  // namespace dtl
