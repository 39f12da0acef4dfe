#pragma once

// Small dense linear algebra shared by every module.
// Exact scalars go through Gauss-Jordan elimination, so ranks and kernels are
// decided by equality. Floating scalars go through the SVD; a singular value
// counts as zero when it is <= kZeroRel * max(sigma_max, scale) and as
// ambiguous when it lies below kBandRel times the same reference.

#include <vector>

#include "dtl/scalar.hpp"

namespace dtl {

namespace detail {

// Reduced row echelon form in place; returns pivot columns.
template <typename T>
std::vector<Index> rref(Mat<T>& R) {
  std::vector<Index> pivots;
  Index row = 0;
  for (Index col = 0; col < R.cols() && row < R.rows(); ++col) {
    Index piv = row;
    while (piv < R.rows() && R(piv, col) == 0) ++piv;
    if (piv == R.rows()) continue;
    R.row(piv).swap(R.row(row));
    const T inv = T(1) / R(row, col);
    R.row(row) *= inv;
    for (Index r = 0; r < R.rows(); ++r)
      if (r != row && R(r, col) != 0) R.row(r) -= R(r, col) * R.row(row);
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <typename T>
Mat<T> float_kernel(const Mat<T>& A, const T& scale) {
  const Index n = A.cols();
  if (A.rows() == 0) return Mat<T>::Identity(n, n);
  Eigen::JacobiSVD<Mat<T>> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  T ref = std::max<T>(scale, sv.size() > 0 ? T(sv(0)) : T(0));
  if (ref == 0) return Mat<T>::Identity(n, n);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    switch (vanishing<T>(sv(i), ref)) {
      case Vanishing::Nonzero:
        ++rank;
        break;
      case Vanishing::Ambiguous:
        fail(ErrorKind::FloatingAmbiguous, "singular value inside the tolerance band");
      default:
        break;
    }
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace detail

// Columns spanning ker A.
template <typename T>
Mat<T> kernel_basis(const Mat<T>& A, const T& scale = T(0)) {
  if constexpr (is_exact_v<T>) {
    (void)scale;
    Mat<T> R = A;
    const auto pivots = detail::rref(R);
    std::vector<bool> is_pivot(static_cast<std::size_t>(A.cols()), false);
    for (Index p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    Mat<T> basis = Mat<T>::Zero(A.cols(), A.cols() - static_cast<Index>(pivots.size()));
    Index k = 0;
    for (Index f = 0; f < A.cols(); ++f) {
      if (is_pivot[static_cast<std::size_t>(f)]) continue;
      basis(f, k) = 1;
      for (std::size_t r = 0; r < pivots.size(); ++r) basis(pivots[r], k) = -R(static_cast<Index>(r), f);
      ++k;
    }
    return basis;
  } else {
    return detail::float_kernel<T>(A, scale);
  }
}

template <typename T>
Index rank(const Mat<T>& A, const T& scale = T(0)) {
  return A.cols() - kernel_basis<T>(A, scale).cols();
}

template <typename T>
Mat<T> inverse(const Mat<T>& A) {
  if (A.rows() != A.cols()) fail(ErrorKind::DomainError, "inverse of a non-square matrix");
  const Index n = A.rows();
  if constexpr (is_exact_v<T>) {
    Mat<T> aug(n, 2 * n);
    aug << A, Mat<T>::Identity(n, n);
    const auto pivots = detail::rref(aug);
    if (static_cast<Index>(pivots.size()) < n || (n > 0 && pivots.back() >= n))
      fail(ErrorKind::DomainError, "matrix is singular");
    return aug.rightCols(n);
  } else {
    if (n == 0) return A;
    Eigen::FullPivLU<Mat<T>> lu(A);
    if (!lu.isInvertible()) fail(ErrorKind::DomainError, "matrix is singular");
    return lu.inverse();
  }
}

// Orthogonal projection onto the span of independent columns.
template <typename T>
Mat<T> projector(const Mat<T>& basis) {
  const Index n = basis.rows();
  if (basis.cols() == 0) return Mat<T>::Zero(n, n);
  const Mat<T> gram = basis.transpose() * basis;
  return basis * inverse<T>(gram) * basis.transpose();
}

template <typename T>
Mat<T> kernel_projector(const Mat<T>& A, const T& scale = T(0)) {
  return projector<T>(kernel_basis<T>(A, scale));
}

// Projection onto ker X restricted to the range of the orthogonal projection pi.
template <typename T>
Mat<T> kernel_projector_within(const Mat<T>& X, const Mat<T>& pi, const T& scale = T(0)) {
  const Mat<T> shifted = X + (Mat<T>::Identity(pi.rows(), pi.cols()) - pi);
  return kernel_projector<T>(shifted, scale);
}

template <typename T>
void require_symmetric(const Mat<T>& A, const T& scale, const char* what) {
  if (!nearly_equal(A, A.transpose(), std::max<T>(scale, T(1))))
    fail(ErrorKind::NotSelfAdjoint, std::string(what) + " is not self-adjoint");
}

// Moore-Penrose inverse of a symmetric matrix: (A + K)^{-1} - K, K = projection onto ker A.
template <typename T>
Mat<T> pinv_symmetric(const Mat<T>& A, const T& scale = T(0)) {
  require_symmetric<T>(A, scale, "pseudo-inverse argument");
  const Mat<T> K = kernel_projector<T>(A, scale);
  return inverse<T>(Mat<T>(A + K)) - K;
}

// Gram-Schmidt without normalisation, so exact inputs stay exact.
template <typename T>
Mat<T> orthogonalize(const Mat<T>& basis) {
  Mat<T> out = basis;
  for (Index k = 0; k < out.cols(); ++k) {
    for (Index i = 0; i < k; ++i) {
      const T nn = out.col(i).squaredNorm();
      if (nn != 0) out.col(k) -= (out.col(i).dot(out.col(k)) / nn) * out.col(i);
    }
  }
  return out;
}

// Positive definiteness of a symmetric matrix on the range of the projection pi:
// A + (1 - pi) must be positive definite. Exact mode checks the pivots of an
// unpivoted elimination (all positive iff positive definite).
template <typename T>
bool positive_definite_on(const Mat<T>& A, const Mat<T>& pi, const T& scale = T(1)) {
  Mat<T> B = A + (Mat<T>::Identity(pi.rows(), pi.cols()) - pi);
  if constexpr (is_exact_v<T>) {
    (void)scale;
    for (Index k = 0; k < B.rows(); ++k) {
      if (!(B(k, k) > 0)) return false;
      for (Index r = k + 1; r < B.rows(); ++r) {
        const T f = B(r, k) / B(k, k);
        B.row(r) -= f * B.row(k);
      }
    }
    return true;
  } else {
    if (B.rows() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Mat<T>> es(B);
    return vanishing<T>(es.eigenvalues()(0), scale) == Vanishing::Nonzero && es.eigenvalues()(0) > 0;
  }
}

}  // namespace dtl
