#pragma once

// Matrix-valued Laurent series in kappa with explicit truncation bookkeeping.
// A series stores orders first()..last(); everything above last() is unknown,
// so asking for it is an error rather than a silent zero.

#include <vector>

#include "dtl/linalg.hpp"

namespace dtl {

template <typename T>
class LaurentSeries {
 public:
  LaurentSeries() = default;
  // Coefficients for orders first, first+1, ...; the series is known through `last`,
  // and orders between the stored ones and `last` are zero.
  LaurentSeries(Index rows, Index cols, int first, std::vector<Mat<T>> coeffs, int last)
      : rows_(rows), cols_(cols), first_(first), last_(last) {
    const int stored = static_cast<int>(coeffs.size());
    if (first_ + stored - 1 > last_) coeffs.resize(static_cast<std::size_t>(std::max(0, last_ - first_ + 1)));
    c_ = std::move(coeffs);
    for (auto& m : c_)
      if (m.rows() != rows_ || m.cols() != cols_) fail(ErrorKind::DomainError, "coefficient shape mismatch");
    while (static_cast<int>(c_.size()) < last_ - first_ + 1) c_.push_back(Mat<T>::Zero(rows_, cols_));
    if (first_ > last_) first_ = last_ + 1;
  }
  static LaurentSeries zero(Index rows, Index cols, int known_through) {
    return LaurentSeries(rows, cols, known_through + 1, {}, known_through);
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  int first() const { return first_; }
  int last() const { return last_; }
  bool known(int j) const { return j <= last_; }

  Mat<T> operator[](int j) const {
    if (j > last_) fail(ErrorKind::TruncationTooShort, "order " + std::to_string(j) + " is beyond the truncation");
    if (j < first_) return Mat<T>::Zero(rows_, cols_);
    return c_[static_cast<std::size_t>(j - first_)];
  }

  // kappa^k times the series.
  LaurentSeries shifted(int k) const { return LaurentSeries(rows_, cols_, first_ + k, c_, last_ + k); }

  LaurentSeries truncated(int last) const {
    if (last > last_) fail(ErrorKind::TruncationTooShort, "cannot extend a truncated series");
    std::vector<Mat<T>> c;
    for (int j = first_; j <= last; ++j) c.push_back((*this)[j]);
    return LaurentSeries(rows_, cols_, first_, std::move(c), last);
  }

  LaurentSeries transpose() const {
    std::vector<Mat<T>> c;
    for (const auto& m : c_) c.push_back(m.transpose());
    return LaurentSeries(cols_, rows_, first_, std::move(c), last_);
  }

  // Drops leading coefficients that vanish (exactly, or within tolerance of `scale`).
  LaurentSeries trimmed(const T& scale) const {
    int first = first_;
    while (first <= last_ && vanishing<T>(max_abs((*this)[first]), scale) == Vanishing::Zero) ++first;
    std::vector<Mat<T>> c;
    for (int j = first; j <= last_; ++j) c.push_back((*this)[j]);
    return LaurentSeries(rows_, cols_, first, std::move(c), last_);
  }

  friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
    a.same_shape(b);
    const int first = std::min(a.first_, b.first_), last = std::min(a.last_, b.last_);
    std::vector<Mat<T>> c;
    for (int j = first; j <= last; ++j) c.push_back(a[j] + b[j]);
    return LaurentSeries(a.rows_, a.cols_, first, std::move(c), last);
  }
  friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + b * T(-1); }
  friend LaurentSeries operator*(const LaurentSeries& a, const T& s) {
    std::vector<Mat<T>> c;
    for (const auto& m : a.c_) c.push_back(m * s);
    return LaurentSeries(a.rows_, a.cols_, a.first_, std::move(c), a.last_);
  }
  friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
    if (a.cols_ != b.rows_) fail(ErrorKind::DomainError, "series product shape mismatch");
    const int first = a.first_ + b.first_;
    const int last = std::min(a.first_ + b.last_, a.last_ + b.first_);
    std::vector<Mat<T>> c;
    for (int j = first; j <= last; ++j) {
      Mat<T> acc = Mat<T>::Zero(a.rows_, b.cols_);
      for (int i = a.first_; i <= a.last_; ++i) {
        const int k = j - i;
        if (k < b.first_ || k > b.last_) continue;
        acc += a.c_[static_cast<std::size_t>(i - a.first_)] * b.c_[static_cast<std::size_t>(k - b.first_)];
      }
      c.push_back(std::move(acc));
    }
    return LaurentSeries(a.rows_, b.cols_, first, std::move(c), last);
  }
  friend LaurentSeries operator*(const Mat<T>& m, const LaurentSeries& b) {
    std::vector<Mat<T>> c;
    for (const auto& x : b.c_) c.push_back(m * x);
    return LaurentSeries(m.rows(), b.cols_, b.first_, std::move(c), b.last_);
  }
  friend LaurentSeries operator*(const LaurentSeries& a, const Mat<T>& m) {
    std::vector<Mat<T>> c;
    for (const auto& x : a.c_) c.push_back(x * m);
    return LaurentSeries(a.rows_, m.cols(), a.first_, std::move(c), a.last_);
  }
  // Adds m to the order-j coefficient.
  LaurentSeries plus_at(int j, const Mat<T>& m) const {
    if (j > last_) fail(ErrorKind::TruncationTooShort, "order beyond the truncation");
    const int first = std::min(first_, j);
    std::vector<Mat<T>> c;
    for (int i = first; i <= last_; ++i) c.push_back(i == j ? Mat<T>((*this)[i] + m) : (*this)[i]);
    return LaurentSeries(rows_, cols_, first, std::move(c), last_);
  }

 private:
  void same_shape(const LaurentSeries& b) const {
    if (rows_ != b.rows_ || cols_ != b.cols_) fail(ErrorKind::DomainError, "series shape mismatch");
  }
  Index rows_ = 0, cols_ = 0;
  int first_ = 0, last_ = -1;
  std::vector<Mat<T>> c_;
};

// Inverse on the range of `pi` of a series X = X_0 + kappa X_1 + ... with
// X_j = pi X_j pi and X_0 invertible there.
template <typename T>
LaurentSeries<T> neumann_inverse(const LaurentSeries<T>& X, const Mat<T>& pi, const T& scale);

template <typename T>
struct JnStep {
  Mat<T> Q;                  // projection onto ker A_0 inside the range of pi
  LaurentSeries<T> a;        // (Q - Q (Q + A)^{-1} Q) / kappa, acting on the range of Q
  LaurentSeries<T> shifted;  // (Q + A)^{-1} on the range of pi
};

// One reduction step for A(kappa) = A_0 + kappa A_1 + ... with A_0 self-adjoint.
// Then A^{-1} = (Q + A)^{-1} + kappa^{-1} (Q + A)^{-1} a^{-1} (Q + A)^{-1}.
template <typename T>
JnStep<T> jn_step(const LaurentSeries<T>& A, const Mat<T>& pi, const T& scale);

template <typename T>
struct InversionResult {
  LaurentSeries<T> inverse;
  int depth = 0;                     // number of reduction steps taken
  std::vector<Index> kernel_dims;    // dim ker of each leading coefficient met, non-increasing
};

// Inverse of M(kappa) = sum_{j >= -1} kappa^j M_j through repeated reduction steps.
template <typename T>
InversionResult<T> invert_laurent(const LaurentSeries<T>& M, int max_depth = 3, const T& scale = T(1));

}  // namespace dtl
