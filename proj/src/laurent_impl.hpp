#pragma once

#include "dtl/laurent.hpp"

namespace dtl {

template <typename T>
LaurentSeries<T> neumann_inverse(const LaurentSeries<T>& X, const Mat<T>& pi, const T& scale) {
  if (X.first() < 0) fail(ErrorKind::DomainError, "Neumann inversion needs a series without negative orders");
  if (X.last() < 0) fail(ErrorKind::TruncationTooShort, "nothing known to invert");
  const Index n = pi.rows();
  const Mat<T> outside = Mat<T>::Identity(n, n) - pi;
  const Mat<T> x0 = X[0];
  if (!nearly_equal(kernel_projector_within<T>(x0, pi, scale), Mat<T>::Zero(n, n), scale))
    fail(ErrorKind::DomainError, "leading coefficient is not invertible on the subspace");
  const Mat<T> y0 = inverse<T>(Mat<T>(x0 + outside)) - outside;
  std::vector<Mat<T>> y{y0};
  for (int k = 1; k <= X.last(); ++k) {
    Mat<T> acc = Mat<T>::Zero(n, n);
    for (int i = 1; i <= k; ++i) acc += X[i] * y[static_cast<std::size_t>(k - i)];
    y.push_back(-y0 * acc);
  }
  return LaurentSeries<T>(n, n, 0, std::move(y), X.last());
}

template <typename T>
JnStep<T> jn_step(const LaurentSeries<T>& A, const Mat<T>& pi, const T& scale) {
  const Index n = pi.rows();
  const Mat<T> a0 = A[0];
  require_symmetric<T>(a0, scale, "leading coefficient");
  JnStep<T> out;
  out.Q = kernel_projector_within<T>(a0, pi, scale);
  out.shifted = neumann_inverse<T>(A.plus_at(0, out.Q), pi, scale);
  const LaurentSeries<T> y = out.Q * out.shifted * out.Q;
  // The order-0 term of Q (Q + A)^{-1} Q is Q itself; it cancels and is dropped.
  if (!nearly_equal(y[0], out.Q, scale)) fail(ErrorKind::ChainInconsistent, "reduction step lost Q (Q + A_0)^{-1} Q = Q");
  if (y.last() < 1) fail(ErrorKind::TruncationTooShort, "series too short for a reduction step");
  std::vector<Mat<T>> a;
  for (int j = 0; j + 1 <= y.last(); ++j) a.push_back(Mat<T>(-y[j + 1]));
  out.a = LaurentSeries<T>(n, n, 0, std::move(a), y.last() - 1);
  return out;
}

namespace detail {

template <typename T>
LaurentSeries<T> invert_on(const LaurentSeries<T>& A, const Mat<T>& pi, int depth, int max_depth,
                           const T& scale, InversionResult<T>& info) {
  if (A.last() < 0) fail(ErrorKind::TruncationTooShort, "series exhausted during inversion");
  const Mat<T> q = kernel_projector_within<T>(A[0], pi, scale);
  const Index kdim = rank<T>(q, scale);
  info.kernel_dims.push_back(kdim);
  if (kdim == 0) {
    info.depth = depth;
    return neumann_inverse<T>(A, pi, scale);
  }
  if (depth >= max_depth) fail(ErrorKind::DepthExceeded, "reduction did not terminate within max_depth");
  const JnStep<T> step = jn_step<T>(A, pi, scale);
  const LaurentSeries<T> inner = invert_on<T>(step.a, step.Q, depth + 1, max_depth, scale, info);
  const LaurentSeries<T> correction = (step.shifted * inner * step.shifted).shifted(-1);
  return (step.shifted + correction).trimmed(scale);
}

}  // namespace detail

template <typename T>
InversionResult<T> invert_laurent(const LaurentSeries<T>& M, int max_depth, const T& scale) {
  if (M.first() < -1) fail(ErrorKind::DomainError, "M(kappa) may not have poles beyond kappa^{-1}");
  if (M.rows() != M.cols()) fail(ErrorKind::DomainError, "M(kappa) must be square");
  InversionResult<T> info;
  const Index n = M.rows();
  const LaurentSeries<T> A = M.shifted(1);
  const LaurentSeries<T> inv = detail::invert_on<T>(A, Mat<T>::Identity(n, n), 0, max_depth, scale, info);
  info.inverse = inv.shifted(1).trimmed(scale);
  return info;
}

}  // namespace dtl

#define DTL_INSTANTIATE_LAURENT(T)                                                                       \
  template class dtl::LaurentSeries<T>;                                                                  \
  template dtl::LaurentSeries<T> dtl::neumann_inverse<T>(const LaurentSeries<T>&, const Mat<T>&, const T&); \
  template dtl::JnStep<T> dtl::jn_step<T>(const LaurentSeries<T>&, const Mat<T>&, const T&);            \
  template dtl::InversionResult<T> dtl::invert_laurent<T>(const LaurentSeries<T>&, int, const T&);
