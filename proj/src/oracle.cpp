#include "dtl/oracle.hpp"

namespace dtl {

NullspaceResult nullspace_oracle(const PotentialSpec& spec) {
  // Outside supp V, H x = 0 is H0 x = 0, so x is affine beyond supp V +- 1.
  long lo = 0, hi = 0;
  bool first = true;
  for (const auto& t : spec.terms) {
    lo = first ? t.vector.first() : std::min(lo, t.vector.first());
    hi = first ? t.vector.last() : std::max(hi, t.vector.last());
    first = false;
  }
  const long L = lo - 2, R = hi + 2;
  const Index core = R - L + 1;
  // Unknowns: x[L..R], then alpha_-, beta_-, alpha_+, beta_+ with
  // x[n] = alpha_- + beta_- n (n <= L + 1) and x[n] = alpha_+ + beta_+ n (n >= R - 1).
  const Index am = core, bm = core + 1, ap = core + 2, bp = core + 3, width = core + 4;
  std::vector<Vec<Rational>> rows;
  auto row = [&]() { return Vec<Rational>(Vec<Rational>::Zero(width)); };
  for (long n : {L, L + 1}) {
    Vec<Rational> e = row();
    e(n - L) = 1;
    e(am) = -1;
    e(bm) = -Rational(n);
    rows.push_back(e);
  }
  for (long n : {R - 1, R}) {
    Vec<Rational> e = row();
    e(n - L) = 1;
    e(ap) = -1;
    e(bp) = -Rational(n);
    rows.push_back(e);
  }
  const Mat<Rational> Vd = spec.dense_matrix(L, R);
  for (long n = L + 1; n <= R - 1; ++n) {
    Vec<Rational> e = row();
    e(n - L) += 2;
    e(n - L - 1) -= 1;
    e(n - L + 1) -= 1;
    for (Index k = 0; k < core; ++k) e(k) += Vd(n - L, k);
    rows.push_back(e);
  }
  Mat<Rational> A(static_cast<Index>(rows.size()), width);
  for (Index i = 0; i < A.rows(); ++i) A.row(i) = rows[static_cast<std::size_t>(i)].transpose();
  const Mat<Rational> N = kernel_basis<Rational>(A);

  NullspaceResult out;
  out.dtilde = static_cast<int>(N.cols());
  // Tail coordinates: n -> (beta_+ + beta_-)/2, |n| -> (beta_+ - beta_-)/2,
  // 1 -> (alpha_+ + alpha_-)/2, sign -> (alpha_+ - alpha_-)/2.
  Mat<Rational> tails(4, width);
  tails.setZero();
  tails(0, bp) = tails(0, bm) = Rational(1, 2);
  tails(1, bp) = Rational(1, 2);
  tails(1, bm) = Rational(-1, 2);
  tails(2, ap) = tails(2, am) = Rational(1, 2);
  tails(3, ap) = Rational(1, 2);
  tails(3, am) = Rational(-1, 2);
  auto dim_with = [&](std::initializer_list<Index> vanish) {
    Mat<Rational> C(static_cast<Index>(vanish.size()), width);
    Index i = 0;
    for (Index t : vanish) C.row(i++) = tails.row(t);
    return static_cast<int>(N.cols() - rank<Rational>(Mat<Rational>(C * N)));
  };
  out.d0 = dim_with({0, 1, 2, 3});
  out.d = dim_with({0, 1});
  out.dqs = dim_with({0, 2});

  auto to_sequence = [&](const Vec<Rational>& x) {
    std::vector<Rational> c(x.data(), x.data() + core);
    return PolyTailSequence<Rational>(L, std::move(c), Poly<Rational>::affine(x(am), x(bm)),
                                      Poly<Rational>::affine(x(ap), x(bp)));
  };
  for (Index k = 0; k < N.cols(); ++k) out.basis.push_back(to_sequence(N.col(k)));
  Mat<Rational> C = tails;
  const Mat<Rational> bound = N * kernel_basis<Rational>(Mat<Rational>(C * N));
  for (Index k = 0; k < bound.cols(); ++k) out.bound.push_back(to_sequence(bound.col(k)));
  return out;
}

Mat<double> dirichlet_resolvent(const PotentialSpec& spec, double kappa, long L, const std::vector<long>& sites) {
  const Index n = 2 * L + 1;
  Mat<double> H = Mat<double>::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    H(i, i) = 2 + kappa * kappa;
    if (i > 0) H(i, i - 1) = -1;
    if (i + 1 < n) H(i, i + 1) = -1;
  }
  const Mat<Rational> V = spec.dense_matrix(-L, L);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < n; ++k)
      if (V(i, k) != 0) H(i, k) += V(i, k).convert_to<double>();
  const Eigen::PartialPivLU<Mat<double>> lu(H);
  const Index ns = static_cast<Index>(sites.size());
  Mat<double> rhs = Mat<double>::Zero(n, ns);
  for (Index k = 0; k < ns; ++k) rhs(sites[k] + L, k) = 1;
  const Mat<double> sol = lu.solve(rhs);
  Mat<double> out(ns, ns);
  for (Index i = 0; i < ns; ++i)
    for (Index k = 0; k < ns; ++k) out(i, k) = sol(sites[i] + L, k);
  return out;
}

}  // namespace dtl
