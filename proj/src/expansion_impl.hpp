#pragma once

#include <utility>

#include "dtl/expansion.hpp"
#include "dtl/laurent.hpp"

namespace dtl {

template <typename T>
PolyTailSequence<T> ExpansionCoefficient<T>::apply(const CompactSequence<T>& x) const {
  PolyTailSequence<T> out = free_part ? apply_g0<T>(order, x) : PolyTailSequence<T>();
  for (const auto& d : correction) {
    const T c = pair(x, d.left) * d.weight;
    if (c != 0) out = out + d.right * c;
  }
  return out;
}

template <typename T>
Mat<T> ExpansionCoefficient<T>::window_rect(long row_lo, long row_hi, long col_lo, long col_hi) const {
  const Index R = row_hi - row_lo + 1, C = col_hi - col_lo + 1;
  Mat<T> out = Mat<T>::Zero(R, C);
  if (free_part) {
    std::vector<T> kernel;
    const long dmin = row_lo - col_hi;
    for (long d = dmin; d <= row_hi - col_lo; ++d) kernel.push_back(g0_kernel<T>(order, d));
    for (Index r = 0; r < R; ++r)
      for (Index c = 0; c < C; ++c) out(r, c) = kernel[static_cast<std::size_t>(row_lo + r - col_lo - c - dmin)];
  }
  Vec<T> rv(R), lv(C);
  for (const auto& d : correction) {
    for (Index r = 0; r < R; ++r) rv(r) = d.right[row_lo + r];
    for (Index c = 0; c < C; ++c) lv(c) = d.left[col_lo + c];
    out += (rv * d.weight) * lv.transpose();
  }
  return out;
}

template <typename T>
Mat<T> ExpansionCoefficient<T>::window(long lo, long hi) const {
  return window_rect(lo, hi, lo, hi);
}

template <typename T>
int ExpansionCoefficient<T>::tail_degree() const {
  int deg = free_part ? order + 1 : -1;
  for (const auto& d : correction) deg = std::max({deg, d.left.tail_degree(), d.right.tail_degree()});
  return deg;
}

template <typename T>
const ExpansionCoefficient<T>& ExpansionResult<T>::at(int j) const {
  const auto it = coefficients.find(j);
  if (it == coefficients.end())
    fail(ErrorKind::TruncationTooShort, "coefficient G_" + std::to_string(j) + " was not computed");
  return it->second;
}

template <typename T>
ExpansionCoefficient<T> ExpansionResult<T>::get(int j) const {
  if (j < j_min) {
    ExpansionCoefficient<T> zero;
    zero.order = j;
    return zero;
  }
  return at(j);
}

namespace detail {

template <typename T>
using Frame = std::vector<PolyTailSequence<T>>;

// Adds A X B* = sum_{p,q} X(p,q) <B_q, .> A_p.
template <typename T>
void add_block(ExpansionCoefficient<T>& g, const Frame<T>& A, const Mat<T>& X, const Frame<T>& B) {
  for (Index p = 0; p < X.rows(); ++p)
    for (Index q = 0; q < X.cols(); ++q)
      if (X(p, q) != 0) g.correction.push_back({B[static_cast<std::size_t>(q)], A[static_cast<std::size_t>(p)], X(p, q)});
}

// Column p of the result is sum_k sum_q F_k[q] C_k(q, p).
template <typename T>
Frame<T> combine(const std::vector<std::pair<const Frame<T>*, Mat<T>>>& parts, Index width) {
  Frame<T> out(static_cast<std::size_t>(width));
  for (const auto& [frame, C] : parts)
    for (Index p = 0; p < width; ++p)
      for (Index q = 0; q < C.rows(); ++q)
        if (C(q, p) != 0) out[static_cast<std::size_t>(p)] = out[static_cast<std::size_t>(p)] + (*frame)[static_cast<std::size_t>(q)] * C(q, p);
  return out;
}

template <typename T>
Frame<T> g0_frame(const FactorizedPotential<T>& pot, int j) {
  Frame<T> out;
  for (Index p = 0; p < pot.rank(); ++p) out.push_back(apply_g0<T>(j, pot.vector(p)));
  return out;
}

template <typename T>
Frame<T> z_frame(const ProjectionChain<T>& chain) {
  Frame<T> out;
  for (Index p = 0; p < chain.dim; ++p) out.push_back(reconstruct(chain, Vec<T>(Vec<T>::Unit(chain.dim, p))));
  return out;
}

// sum over compositions (j_1..j_k) of total, k >= 1, j_l >= 1, of X0 prod_l (-x(j_l) X0).
template <typename T, typename F>
Mat<T> composition_sum(const Mat<T>& X0, const F& x, int total) {
  Mat<T> acc = Mat<T>::Zero(X0.rows(), X0.cols());
  std::function<void(int, const Mat<T>&)> walk = [&](int remaining, const Mat<T>& prefix) {
    if (remaining == 0) {
      acc += prefix;
      return;
    }
    for (int p = 1; p <= remaining; ++p) walk(remaining - p, Mat<T>(prefix * Mat<T>(-x(p)) * X0));
  };
  if (total >= 1) walk(total, X0);
  return acc;
}

template <typename T>
void expect_equal(const Mat<T>& a, const Mat<T>& b, const T& scale, const char* what) {
  if (!nearly_equal(a, b, scale)) fail(ErrorKind::ChainInconsistent, std::string("ladder disagrees with chain: ") + what);
}

// Product sum over the ladders of one term: sum over index tuples with sum m of
// L_1[i_1] ... L_k[i_k], every index at least `floor`.
template <typename T>
Mat<T> middle_sum(const std::vector<const std::vector<Mat<T>>*>& ladders, int m, int floor) {
  const std::size_t k = ladders.size();
  const Index n = ladders.front()->front().rows();
  Mat<T> acc = Mat<T>::Zero(n, n);
  std::function<void(std::size_t, int, const Mat<T>&)> walk = [&](std::size_t pos, int remaining, const Mat<T>& prefix) {
    const auto& L = *ladders[pos];
    if (pos + 1 == k) {
      if (remaining < floor || remaining >= static_cast<int>(L.size()))
        fail(ErrorKind::TruncationTooShort, "ladder too short for the master sum");
      acc += prefix * L[static_cast<std::size_t>(remaining)];
      return;
    }
    const int rest = static_cast<int>(k - pos - 1) * floor;
    for (int i = floor; i + rest <= remaining; ++i) {
      if (i >= static_cast<int>(L.size())) fail(ErrorKind::TruncationTooShort, "ladder too short for the master sum");
      walk(pos + 1, remaining - i, Mat<T>(prefix * L[static_cast<std::size_t>(i)]));
    }
  };
  walk(0, m, Mat<T>::Identity(n, n));
  return acc;
}

template <typename T>
bool negligible(const T& value, const T& scale) {
  return vanishing<T>(value, std::max<T>(scale, T(1))) == Vanishing::Zero;
}

}  // namespace detail

template <typename T>
Ladders<T> build_ladders(const ProjectionChain<T>& chain, int depth) {
  Ladders<T> l;
  const int c = chain.case_id();
  l.case_id = c;
  const Index r = chain.dim;
  const Mat<T> I = Mat<T>::Identity(r, r);
  const T& sc = chain.scale;
  const int a_top = c == 1 ? depth : depth + c - 1;
  l.M = m_coefficients<T>(chain.pot, std::max(a_top, 2));
  auto M = [&](int j) -> const Mat<T>& { return l.M[static_cast<std::size_t>(j + 1)]; };

  if (c == 1) {
    const Mat<T> g = I * chain.gamma;
    l.A.push_back(Mat<T>::Zero(r, r));
    for (int j = 1; j <= depth; ++j) l.A.push_back(detail::composition_sum<T>(g, [&](int p) { return M(p - 1); }, j - 1) + (j == 1 ? g : Mat<T>::Zero(r, r)));
    return l;
  }

  l.A.push_back(chain.Q + chain.P * chain.gamma);
  for (int j = 1; j <= a_top; ++j) l.A.push_back(detail::composition_sum<T>(l.A[0], [&](int p) { return M(p - 1); }, j));
  for (int j = 0; j + 1 <= a_top; ++j) l.m.push_back(Mat<T>(-chain.Q * l.A[static_cast<std::size_t>(j + 1)] * chain.Q));
  detail::expect_equal<T>(l.m[0], chain.m0, sc, "m_0");
  if (l.m.size() > 1) detail::expect_equal<T>(l.m[1], chain.m1, sc, "m_1");
  if (l.m.size() > 2) detail::expect_equal<T>(l.m[2], chain.m2, sc, "m_2");

  const int b_top = a_top - 1;
  l.B.push_back(c == 2 ? chain.m0_pinv : Mat<T>(chain.S + chain.m0_pinv));
  for (int j = 1; j <= b_top; ++j) l.B.push_back(detail::composition_sum<T>(l.B[0], [&](int p) { return l.m[static_cast<std::size_t>(p)]; }, j));
  if (c == 2) return l;

  for (int j = 0; j + 1 <= b_top; ++j) l.q.push_back(Mat<T>(-chain.S * l.B[static_cast<std::size_t>(j + 1)] * chain.S));
  detail::expect_equal<T>(l.q[0], chain.q0, sc, "q_0");
  if (l.q.size() > 1) detail::expect_equal<T>(l.q[1], chain.q1, sc, "q_1");
  const int c_top = b_top - 1;
  l.C.push_back(c == 3 ? chain.q0_pinv : Mat<T>(chain.Tp + chain.q0_pinv));
  for (int j = 1; j <= c_top; ++j) l.C.push_back(detail::composition_sum<T>(l.C[0], [&](int p) { return l.q[static_cast<std::size_t>(p)]; }, j));
  if (c == 3) return l;

  for (int j = 0; j + 1 <= c_top; ++j) l.r.push_back(Mat<T>(-chain.Tp * l.C[static_cast<std::size_t>(j + 1)] * chain.Tp));
  detail::expect_equal<T>(l.r[0], chain.r0, sc, "r_0");
  l.D.push_back(chain.r0_pinv);
  for (int j = 1; j <= depth; ++j) l.D.push_back(detail::composition_sum<T>(l.D[0], [&](int p) { return l.r[static_cast<std::size_t>(p)]; }, j));
  return l;
}

template <typename T>
ExpansionResult<T> expand(const ProjectionChain<T>& chain, int N) {
  const int c = chain.case_id();
  if (N < chain.j_min()) fail(ErrorKind::DomainError, "order below the leading order of the expansion");
  ExpansionResult<T> out;
  out.case_id = c;
  out.j_min = chain.j_min();
  out.order = N;
  const Index r = chain.dim;

  // Term k runs over the ladders A, B, .. (k letters up), with index total j + shift.
  struct Term {
    std::vector<const std::vector<Mat<T>>*> ladders;
    int shift;
    int floor;
  };
  const int top_shift = c == 1 ? 0 : c - 2;
  const int depth = N + top_shift + 2;
  const Ladders<T> lad = build_ladders(chain, depth);
  std::vector<Term> terms;
  if (c == 1) {
    terms.push_back({{&lad.A}, 0, 1});
  } else {
    const std::vector<const std::vector<Mat<T>>*> letters = {&lad.A, &lad.B, &lad.C, &lad.D};
    for (int k = 0; k < c; ++k) {
      Term t{{}, k - 1, 0};
      for (int i = 0; i <= k; ++i) t.ladders.push_back(letters[static_cast<std::size_t>(i)]);
      for (int i = k - 1; i >= 0; --i) t.ladders.push_back(letters[static_cast<std::size_t>(i)]);
      terms.push_back(std::move(t));
    }
  }
  const int j_lo = c == 1 ? -1 : -c;

  std::map<int, detail::Frame<T>> g;
  for (int j = -1; j <= N + top_shift + 1; ++j) g[j] = detail::g0_frame(chain.pot, j);
  std::map<std::pair<std::size_t, int>, Mat<T>> middle;
  auto middle_of = [&](std::size_t t, int m) -> const Mat<T>& {
    auto it = middle.find({t, m});
    if (it == middle.end()) it = middle.emplace(std::make_pair(t, m), detail::middle_sum<T>(terms[t].ladders, m, terms[t].floor)).first;
    return it->second;
  };

  for (int j = j_lo; j <= N; ++j) {
    std::map<std::pair<int, int>, Mat<T>> blocks;
    if (r > 0) {
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const int s = j + terms[t].shift;
        const int min_m = static_cast<int>(terms[t].ladders.size()) * terms[t].floor;
        for (int j1 = -1; j1 <= s + 2; ++j1)
          for (int j3 = -1; j1 + j3 <= s - min_m; ++j3) {
            const Mat<T>& X = middle_of(t, s - j1 - j3);
            blocks.try_emplace({j1, j3}, Mat<T>::Zero(r, r)).first->second += X;
          }
      }
    }
    ExpansionCoefficient<T> coef;
    coef.order = j;
    coef.free_part = j >= -1;
    for (const auto& [idx, X] : blocks) detail::add_block<T>(coef, g.at(idx.first), Mat<T>(-X), g.at(idx.second));

    if (j < out.j_min) {
      // Spurious order: must cancel identically. The kernel entries are polynomial
      // in the sites outside supp V, so a window of a few extra sites suffices.
      const long pad = 2L * (coef.tail_degree() + 3);
      const long lo = chain.pot.support_lo() - pad, hi = chain.pot.support_hi() + pad;
      const Mat<T> w = coef.window(lo, hi);
      T ref = 0;
      for (const auto& d : coef.correction) {
        T a = 0, b = 0;
        for (long n = lo; n <= hi; ++n) {
          a = std::max<T>(a, abs_of(d.left[n]));
          b = std::max<T>(b, abs_of(d.right[n]));
        }
        ref = std::max<T>(ref, abs_of(d.weight) * a * b);
      }
      if (!detail::negligible<T>(max_abs(w), ref))
        fail(ErrorKind::ChainInconsistent, "order " + std::to_string(j) + " of the master sum does not cancel");
      continue;
    }
    out.coefficients.emplace(j, std::move(coef));
  }
  return out;
}

template <typename T>
std::map<int, Mat<T>> series_compose(const FactorizedPotential<T>& pot, int N, long lo, long hi) {
  const Index W = hi - lo + 1, r = pot.rank();
  std::map<int, Mat<T>> out;
  for (int j = -2; j <= N; ++j) out[j] = j == -2 ? Mat<T>(Mat<T>::Zero(W, W)) : coefficient_window<T>(j, lo, hi);
  if (r == 0) return out;
  for (int J = N + 6; J <= N + 40; J += 4) {
    const std::vector<Mat<T>> ms = m_coefficients<T>(pot, J);
    T scale = pot.scale();
    for (const auto& m : ms) scale = std::max<T>(scale, max_abs(m));
    const InversionResult<T> info = invert_laurent<T>(LaurentSeries<T>(r, r, -1, ms, J), 3, scale);
    std::vector<Mat<T>> cols;
    for (int j = -1; j <= J; ++j) {
      Mat<T> L(W, r);
      for (Index p = 0; p < r; ++p) {
        const PolyTailSequence<T> gp = apply_g0<T>(j, pot.vector(p));
        for (Index a = 0; a < W; ++a) L(a, p) = gp[lo + a];
      }
      cols.push_back(std::move(L));
    }
    const LaurentSeries<T> Ls(W, r, -1, std::move(cols), J);
    const LaurentSeries<T> corr = Ls * info.inverse * Ls.transpose();
    if (corr.last() < N) continue;
    for (int j = corr.first(); j < -2; ++j)
      if (vanishing<T>(max_abs(corr[j]), scale) == Vanishing::Nonzero)
        fail(ErrorKind::ChainInconsistent, "series composition has a pole beyond kappa^{-2}");
    for (int j = -2; j <= N; ++j) out[j] -= corr[j];
    return out;
  }
  fail(ErrorKind::TruncationTooShort, "series composition did not reach the requested order");
}

namespace detail {

template <typename T>
Mat<T> q0_pinv_closed_form(const ProjectionChain<T>& c) {
  const T k = c.phi3s.dot(c.phi2);
  const Vec<T>& a = c.phi3s;
  const Vec<T>& b = c.phi4s;
  if (c.nonzero[3]) {
    const Mat<T> inner = a * a.transpose() + b * b.transpose() * T(T(1) + k * k) - (b * a.transpose() + a * b.transpose()) * k;
    return inner * T(-2);
  }
  return (a * a.transpose()) * T(T(-2) / (T(1) + k * k));
}

}  // namespace detail

template <typename T>
SingularParts<T> singular_parts(const ProjectionChain<T>& chain) {
  SingularParts<T> sp;
  const int c = chain.case_id();
  sp.case_id = c;
  sp.g_m2.order = -2;
  sp.g_m1.order = -1;
  sp.g_m1.free_part = true;
  ExpansionCoefficient<T> g0;
  g0.order = 0;
  g0.free_part = true;
  const Index r = chain.dim;
  if (r == 0) {
    sp.g0 = g0;
    return sp;
  }
  using detail::add_block;
  const Mat<T> I = Mat<T>::Identity(r, r);
  const T gm = chain.gamma;
  const Mat<T> M0 = chain.m_coeff(0), M1 = chain.m_coeff(1);
  const detail::Frame<T> gm1 = detail::g0_frame(chain.pot, -1), g00 = detail::g0_frame(chain.pot, 0),
                         g1 = detail::g0_frame(chain.pot, 1);
  // W = gamma G_{-1}^0 v M_0 - G_0^0 v,  Y = (1 - gamma G_{-1}^0 v v*) G_1^0 v
  const detail::Frame<T> W = detail::combine<T>({{&gm1, Mat<T>(M0 * gm)}, {&g00, Mat<T>(-I)}}, r);
  const detail::Frame<T> Y = detail::combine<T>({{&g1, I}, {&gm1, Mat<T>(M1 * (-gm))}}, r);

  add_block<T>(sp.g_m1, gm1, Mat<T>(-gm * I), gm1);
  if (c <= 3) {
    add_block<T>(g0, gm1, Mat<T>(M0 * (gm * gm)), gm1);
    add_block<T>(g0, gm1, Mat<T>(-gm * I), g00);
    add_block<T>(g0, g00, Mat<T>(-gm * I), gm1);
    add_block<T>(g0, W, Mat<T>(-chain.m0_pinv), W);
  }
  if (c >= 3) {
    sp.q0_pinv = detail::q0_pinv_closed_form(chain);
    if (!nearly_equal(sp.q0_pinv, chain.q0_pinv, chain.scale))
      fail(ErrorKind::ChainInconsistent, "closed form of q_0^dagger disagrees with the pseudo-inverse");
  }
  const detail::Frame<T> Z = c >= 3 ? detail::z_frame(chain) : detail::Frame<T>{};
  if (c == 3) {
    const Mat<T>& qp = sp.q0_pinv;
    add_block<T>(sp.g_m1, Z, Mat<T>(-qp), Z);
    add_block<T>(g0, Z, chain.S, Z);
    add_block<T>(g0, Z, Mat<T>(qp * chain.q1 * qp), Z);
    add_block<T>(g0, Z, Mat<T>(qp * chain.m1 * chain.m0_pinv), W);
    add_block<T>(g0, W, Mat<T>(chain.m0_pinv * chain.m1 * qp), Z);
    add_block<T>(g0, Z, qp, Y);
    add_block<T>(g0, Y, qp, Z);
    add_block<T>(g0, Z, Mat<T>(qp * M0 * chain.P * gm), W);
    add_block<T>(g0, W, Mat<T>(chain.P * M0 * qp * gm), Z);
  }
  if (c == 4) {
    const Mat<T>& qp = sp.q0_pinv;
    const Mat<T>& rp = chain.r0_pinv;
    const Ladders<T> lad = build_ladders(chain, 1);
    const Mat<T>& r1 = lad.r.at(1);
    add_block<T>(sp.g_m2, Z, Mat<T>(-rp), Z);
    add_block<T>(sp.g_m1, Z, Mat<T>(chain.Tp + rp * r1 * rp), Z);
    add_block<T>(sp.g_m1, Z, Mat<T>(-qp + qp * chain.q1 * rp + rp * chain.q1 * qp), Z);
    add_block<T>(sp.g_m1, Z, rp, Y);
    add_block<T>(sp.g_m1, Y, rp, Z);
  } else {
    sp.g0 = std::move(g0);
  }
  return sp;
}

namespace detail {

template <typename T>
T sequence_scale(const PolyTailSequence<T>& x) {
  return std::max<T>(T(1), sup_coefficient(x));
}

}  // namespace detail

template <typename T>
GreenReport<T> green_identity_check(const ProjectionChain<T>& chain, const ExpansionResult<T>& G, long site_lo,
                                    long site_hi) {
  GreenReport<T> rep;
  rep.site_lo = site_lo;
  rep.site_hi = site_hi;
  const ExpansionCoefficient<T>& g0 = G.at(0);
  const ExpansionCoefficient<T> gm2 = G.get(-2);
  for (long a = site_lo; a <= site_hi; ++a) {
    const CompactSequence<T> e = CompactSequence<T>::unit(a);
    const PolyTailSequence<T> u = g0.apply(e);
    const PolyTailSequence<T> res = apply_h(chain.pot, u) - (PolyTailSequence<T>(e) - gm2.apply(e));
    const T size = sup_coefficient(res);
    if (!detail::negligible<T>(size, std::max(chain.scale, detail::sequence_scale(u))))
      fail(ErrorKind::IdentityViolated, "H G_0 e_a != e_a - G_{-2} e_a at site a = " + std::to_string(a) +
                                            ", residual " + to_string(size));
  }
  if (G.case_id <= 2) {
    rep.mod_b0_checked = true;
    const PolyTailSequence<T> psi5 = chain.dim > 0 ? reconstruct(chain, chain.phi5) : PolyTailSequence<T>();
    for (long a = site_lo; a <= site_hi; ++a) {
      const CompactSequence<T> e = CompactSequence<T>::unit(a);
      const PolyTailSequence<T> d = g0.apply(e) - apply_g0<T>(0, e) - ones<T>() * psi5[a] - psi5;
      for (const auto* p : {&d.left(), &d.right()})
        for (int k = 1; k <= p->degree(); ++k)
          if (!detail::negligible<T>(abs_of(p->coeff(k)), detail::sequence_scale(d)))
            fail(ErrorKind::IdentityViolated, "G_0 - G_0^0 - <Psi_5,.>1 - <1,.>Psi_5 grows at site a = " + std::to_string(a));
    }
  }
  return rep;
}

template <typename T>
G0ClosedForm<T> g0_closed_forms(const ProjectionChain<T>& chain, const ExpansionResult<T>& G, long site_lo,
                                long site_hi) {
  const int c = chain.case_id();
  if (c == 4) fail(ErrorKind::NotApplicable, "no closed form for G_0 in case 4");
  const Index r = chain.dim;
  const Mat<T> M0 = chain.m_coeff(0);
  const ThresholdReport<T> rep = classify(chain);
  const bool qs_trivial = rep.dqs == 0;
  if (qs_trivial != (kernel_basis<T>(M0, chain.scale).cols() == 0))
    fail(ErrorKind::QsAssumptionViolated, "1 + G_0^0 V invertibility disagrees with the quasi-symmetric space");
  if (!qs_trivial && c == 3) fail(ErrorKind::NotApplicable, "no closed form for G_0 in case 3 with resonances of the quasi-symmetric kind");

  G0ClosedForm<T> out;
  const ExpansionCoefficient<T>& g0 = G.at(0);
  const detail::Frame<T> g00 = detail::g0_frame(chain.pot, 0);
  const PolyTailSequence<T> psi5 = r > 0 ? reconstruct(chain, chain.phi5) : PolyTailSequence<T>();

  if (qs_trivial) {
    // (1 + G_0^0 V)^{-1} G_0^0 = G_0^0 - G_0^0 v (U M_0)^{-1} U v* G_0^0
    ExpansionCoefficient<T> base;
    base.order = 0;
    base.free_part = true;
    if (r > 0) {
      const Mat<T> U = chain.U;
      detail::add_block<T>(base, g00, Mat<T>(-inverse<T>(Mat<T>(U * M0)) * U), g00);
    }
    if (c <= 2) {
      out.variant = "inverse";
      if (chain.nonzero[4]) base.correction.push_back({psi5, psi5, T(T(1) / chain.delta)});
    } else {
      out.variant = "fitted";
      const PolyTailSequence<T> psi3 = reconstruct(chain, chain.phi3), psi6 = reconstruct(chain, chain.phi6);
      const Mat<T> D = g0.window(site_lo, site_hi) - base.window(site_lo, site_hi);
      const Index n = D.rows();
      Mat<T> basis(n * n, 2);
      Vec<T> rhs(n * n);
      for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
          const long x = site_lo + a, y = site_lo + b;
          basis(a * n + b, 0) = psi3[x] * psi3[y];
          basis(a * n + b, 1) = psi6[x] * psi3[y] + psi3[x] * psi6[y];
          rhs(a * n + b) = D(a, b);
        }
      const Mat<T> normal = basis.transpose() * basis;
      const Vec<T> coef = pinv_symmetric<T>(normal, chain.scale) * (basis.transpose() * rhs);
      out.delta1 = coef(0);
      out.delta2 = coef(1);
      base.correction.push_back({psi3, psi3, out.delta1});
      base.correction.push_back({psi3, psi6, out.delta2});
      base.correction.push_back({psi6, psi3, out.delta2});
    }
    out.apply = [base](const CompactSequence<T>& x) { return base.apply(x); };
  } else {
    out.variant = "projected";
    // pi_1* w = w - <V Psi_5, w> 1; the projected inverse is a finite solve for
    // c = U v* y and t = <V Psi_5, y> with y = pi_1* G_0^0 x - sum_p c_p pi_1* G_0^0 v_p + t 1.
    const FactorizedPotential<T>& pot = chain.pot;
    const PolyTailSequence<T> vpsi5 = apply_v(pot, psi5);
    const PolyTailSequence<T> one = ones<T>();
    const PolyTailSequence<T> vone = apply_v(pot, one);
    auto pi1s = [vpsi5, one](const PolyTailSequence<T>& w) { return w - one * pair(vpsi5, w); };
    detail::Frame<T> h;
    for (const auto& col : g00) h.push_back(pi1s(col));
    const Mat<T> U = chain.U;
    Mat<T> sys = Mat<T>::Zero(r + 1, r + 1);
    for (Index p = 0; p < r; ++p) {
      const Vec<T> vh = pot.adjoint(h[static_cast<std::size_t>(p)]);
      sys.block(0, p, r, 1) = U * vh;
      sys(r, p) = -pair(vone, h[static_cast<std::size_t>(p)]);
    }
    sys.topLeftCorner(r, r) += Mat<T>::Identity(r, r);
    sys.block(0, r, r, 1) = -U * chain.phi1;
    sys(r, r) = pair(vone, one);
    Mat<T> solver;
    try {
      solver = inverse<T>(sys);
    } catch (const Error&) {
      fail(ErrorKind::IdentityViolated, "projected operator is not invertible");
    }
    out.apply = [=](const CompactSequence<T>& x) {
      const PolyTailSequence<T> gx = pi1s(apply_g0<T>(0, x));
      Vec<T> b(r + 1);
      b.head(r) = U * pot.adjoint(gx);
      b(r) = -pair(vone, gx);
      const Vec<T> sol = solver * b;
      PolyTailSequence<T> y = gx + one * sol(r);
      for (Index p = 0; p < r; ++p) y = y - h[static_cast<std::size_t>(p)] * sol(p);
      return y + psi5 * pair(x, one);
    };
  }

  out.matches = true;
  for (long a = site_lo; a <= site_hi; ++a) {
    const CompactSequence<T> e = CompactSequence<T>::unit(a);
    const PolyTailSequence<T> expected = g0.apply(e);
    const T res = sup_coefficient(PolyTailSequence<T>(out.apply(e) - expected));
    out.max_residual = std::max<T>(out.max_residual, res);
    if (!detail::negligible<T>(res, std::max(chain.scale, detail::sequence_scale(expected)))) out.matches = false;
  }
  return out;
}

}  // namespace dtl

#define DTL_INSTANTIATE_EXPANSION(T)                                                                        \
  template struct dtl::ExpansionCoefficient<T>;                                                             \
  template struct dtl::ExpansionResult<T>;                                                                  \
  template dtl::Ladders<T> dtl::build_ladders<T>(const ProjectionChain<T>&, int);                           \
  template dtl::ExpansionResult<T> dtl::expand<T>(const ProjectionChain<T>&, int);                          \
  template std::map<int, dtl::Mat<T>> dtl::series_compose<T>(const FactorizedPotential<T>&, int, long, long); \
  template dtl::SingularParts<T> dtl::singular_parts<T>(const ProjectionChain<T>&);                         \
  template dtl::GreenReport<T> dtl::green_identity_check<T>(const ProjectionChain<T>&, const ExpansionResult<T>&, long, long); \
  template dtl::G0ClosedForm<T> dtl::g0_closed_forms<T>(const ProjectionChain<T>&, const ExpansionResult<T>&, long, long);
