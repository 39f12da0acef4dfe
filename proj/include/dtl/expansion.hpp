#pragma once

// Laurent coefficients of R(kappa) = (H + kappa^2)^{-1} = sum_j kappa^j G_j.
//
// Every G_j is stored as an optional free convolution G_j^0 plus a finite-rank
// correction sum_k w_k <left_k, .> right_k whose factors are polynomial-tail
// sequences, so operators on the whole lattice are represented exactly.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dtl/threshold.hpp"

namespace dtl {

template <typename T>
struct Dyad {
  PolyTailSequence<T> left, right;
  T weight = 0;
};

template <typename T>
struct ExpansionCoefficient {
  int order = 0;
  bool free_part = false;  // includes G_order^0
  std::vector<Dyad<T>> correction;

  PolyTailSequence<T> apply(const CompactSequence<T>& x) const;
  // Row a, column b: <e_a, G e_b> for a, b in [lo, hi].
  Mat<T> window(long lo, long hi) const;
  T entry(long a, long b) const { return window_rect(a, a, b, b)(0, 0); }
  Mat<T> window_rect(long row_lo, long row_hi, long col_lo, long col_hi) const;
  int tail_degree() const;
};

template <typename T>
struct ExpansionResult {
  int case_id = 1;
  int j_min = -1;
  int order = 0;
  std::map<int, ExpansionCoefficient<T>> coefficients;  // j_min..order

  const ExpansionCoefficient<T>& at(int j) const;
  // Zero for orders below j_min, unknown (TruncationTooShort) above order.
  ExpansionCoefficient<T> get(int j) const;
};

// Taylor coefficients of the inverses met along the reduction.
//   case 1: M^{-1}   = sum_j kappa^j A_j            (A_0 = 0, A_1 = gamma)
//   else:   (Q + kappa M)^{-1} = sum A_j kappa^j,  m_j = -Q A_{j+1} Q
//           (S + m)^{-1} = sum B_j kappa^j,        q_j = -S B_{j+1} S
//           (T + q)^{-1} = sum C_j kappa^j,        r_j = -T C_{j+1} T
//           r^{-1}       = sum D_j kappa^j
// Each A_j, B_j, C_j, D_j with j >= 1 is the literal sum over compositions
// X_0 prod_l (-x_{j_l} X_0).
template <typename T>
struct Ladders {
  int case_id = 1;
  std::vector<Mat<T>> M;  // M[j + 1] = M_j
  std::vector<Mat<T>> A, B, C, D;
  std::vector<Mat<T>> m, q, r;
};

// Ladders needed for the case's master sum through ladder index `depth`.
template <typename T>
Ladders<T> build_ladders(const ProjectionChain<T>& chain, int depth);

// G_j for j = j_min..N by the master sums of the case. Orders below j_min are
// assembled as well and must cancel; a failure raises ChainInconsistent.
template <typename T>
ExpansionResult<T> expand(const ProjectionChain<T>& chain, int N);

template <typename T>
ExpansionResult<T> expand(const FactorizedPotential<T>& pot, int N) {
  return expand(build_chain(pot), N);
}

// Second route: R0 - (R0 v) M(kappa)^{-1} (v* R0) with M^{-1} from invert_laurent,
// returned as matrices [<e_a, G_j e_b>], a, b in [lo, hi], for j = -2..N.
template <typename T>
std::map<int, Mat<T>> series_compose(const FactorizedPotential<T>& pot, int N, long lo, long hi);

template <typename T>
struct SingularParts {
  int case_id = 1;
  ExpansionCoefficient<T> g_m2, g_m1;
  std::optional<ExpansionCoefficient<T>> g0;  // not available in case 4
  Mat<T> q0_pinv;                              // closed form, cases 3 and 4
};

// Closed forms for G_{-2}, G_{-1} and G_0, assembled without the master sums.
template <typename T>
SingularParts<T> singular_parts(const ProjectionChain<T>& chain);

template <typename T>
struct GreenReport {
  long site_lo = -10, site_hi = 10;
  bool mod_b0_checked = false;  // G_0 - G_0^0 - <Psi_5,.> 1 - <1,.> Psi_5 has bounded tails
};

// H G_0 e_a = e_a - G_{-2} e_a for every site a; throws IdentityViolated otherwise.
template <typename T>
GreenReport<T> green_identity_check(const ProjectionChain<T>& chain, const ExpansionResult<T>& G,
                                    long site_lo = -10, long site_hi = 10);

template <typename T>
struct G0ClosedForm {
  std::string variant;  // "inverse", "projected" or "fitted"
  T delta1 = 0, delta2 = 0;
  bool matches = false;
  T max_residual = 0;
  std::function<PolyTailSequence<T>(const CompactSequence<T>&)> apply;
};

// Alternative expressions for G_0 compared with G on e_a, a in [site_lo, site_hi].
// NotApplicable in case 4 and in case 3 with a nontrivial quasi-symmetric space.
template <typename T>
G0ClosedForm<T> g0_closed_forms(const ProjectionChain<T>& chain, const ExpansionResult<T>& G, long site_lo = -5,
                                long site_hi = 5);

}  // namespace dtl
