#pragma once

// Ground truth computed without the threshold machinery: the Krein formula at
// finite kappa, remainder-order fits, a direct solve for the generalized null
// space, and the reduction of threshold 4 to threshold 0.

#include <vector>

#include "dtl/expansion.hpp"

namespace dtl {

struct NullspaceResult {
  int dtilde = 0, d = 0, d0 = 0, dqs = 0;
  std::vector<PolyTailSequence<Rational>> basis;  // all solutions of H x = 0 with affine tails
  std::vector<PolyTailSequence<Rational>> bound;  // basis of the compact solutions
};

// Solves H x = 0 for x = core on [lo - 2, hi + 2] plus affine tails, exactly.
// Works from the dense rational V, so irrational factorizations are fine.
NullspaceResult nullspace_oracle(const PotentialSpec& spec);

// Largest admissible condition number of M(kappa) in scalar R.
template <typename R>
double max_condition() {
  return std::is_same_v<R, double> ? 1e12 : 1e40;
}

// [<e_a, R(kappa) e_b>] for a, b in `sites`, via R = R0 - R0 v M(kappa)^{-1} v* R0
// with M(kappa) = U + v* R0 v. NearSingular when M(kappa) is badly conditioned.
template <typename R>
Mat<R> resolvent_matrix(const FactorizedPotential<R>& pot, const R& kappa, const std::vector<long>& sites);

template <typename R>
R exact_resolvent_entry(const FactorizedPotential<R>& pot, const R& kappa, long a, long b) {
  return resolvent_matrix<R>(pot, kappa, {a, b})(0, 1);
}

// (H + kappa^2)^{-1} on [-L, L] with Dirichlet cutoff, restricted to `sites`.
Mat<double> dirichlet_resolvent(const PotentialSpec& spec, double kappa, long L, const std::vector<long>& sites);

struct SlopeGrid {
  Rational kappa_base = Rational(1, 16);
  int steps = 10;  // kappa_k = 2^{-k} kappa_base, k = 0..steps
};

struct SlopeEntry {
  long a = 0, b = 0;
  double slope = 0;
  double max_residual = 0;
  bool pass = false;
};

struct SlopeReport {
  int order = 0;
  std::vector<double> kappas;
  std::vector<SlopeEntry> entries;
  bool pass = true;
};

// Least-squares slope of log|R(kappa) - sum_{j <= N} kappa^j G_j| against log kappa
// per entry; an entry passes with slope >= N + 0.8 or residual below 1e-12 on the grid.
template <typename T>
SlopeReport remainder_slope(const PotentialSpec& spec, const ExpansionResult<T>& G, int N,
                            const std::vector<long>& sites, const SlopeGrid& grid = {});

// Threshold 4 of H0 + V, analysed as threshold 0 of H0 - J V J^{-1}. Bound
// states are mapped back through J; the other basis vectors stay in the
// reflected frame.
template <typename T>
ThresholdReport<T> threshold4_analysis(const PotentialSpec& spec);

}  // namespace dtl
