#pragma once

// Threshold analysis at kappa = 0.
//
// Everything lives in the auxiliary space K = R^rank. With Phi_1 = v* 1:
//   P = <Phi_1, .> Phi_1 / |Phi_1|^2,  Q = 1 - P,  gamma = 2 |Phi_1|^{-2} (0 if Phi_1 = 0)
//   m_0 = Q M_0 Q,  S = projection onto Q K cap ker m_0
//   q_0 = S m_1 S,  T = projection onto S K cap ker q_0
//   r_0 = T q_1 T   (negative definite on T K)
// The first operator in P, m_0, q_0, r_0 that is invertible on its space fixes the
// expansion case 1..4. The vectors Phi_1..Phi_6 and Delta decide the finer label.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dtl/potential.hpp"

namespace dtl {

enum class Stage { P = 1, M0 = 2, Q0 = 3, R0 = 4 };
enum class ThresholdType { Regular, ExceptionalI, ExceptionalII, ExceptionalIII };

const char* stage_name(Stage s);
const char* type_name(ThresholdType t);

template <typename T>
struct ProjectionChain {
  FactorizedPotential<T> pot;
  Index dim = 0;
  T scale = 1;
  Mat<T> U;
  std::vector<Mat<T>> M;  // M[j + 1] = M_j, j = -1..
  Mat<T> m_coeff(int j) const { return M.at(static_cast<std::size_t>(j + 1)); }

  T gamma = 0;
  T delta = 0;  // <Phi_1*, M_0 Phi_5>
  Vec<T> phi1, phi2, phi3, phi4, phi5, phi6;
  Vec<T> phi1s, phi2s, phi3s, phi4s;  // Phi* = |Phi|^{-2} Phi (0 for Phi = 0)
  Vec<T> n_moment;                     // v* n
  std::array<bool, 5> nonzero{};       // Phi_1, Phi_2, Phi_3, Phi_4, Delta
  Mat<T> P, Q, S, Tp, Ptilde;
  Mat<T> m0, m0_pinv, m1, m2, q0, q0_pinv, q1, r0, r0_pinv;
  Stage stage = Stage::P;
  PolyTailSequence<T> psi1, psi2;  // Psi_1^0 = 1, Psi_2^0 = n - <Phi_1, v* n> |Phi_1|^{-2} 1

  int case_id() const { return static_cast<int>(stage); }
  int j_min() const { return stage == Stage::R0 ? -2 : -1; }
};

// Builds the chain and checks its internal identities; throws ChainInconsistent
// when one fails. M is computed through order m_order (at least 2).
template <typename T>
ProjectionChain<T> build_chain(const FactorizedPotential<T>& pot, int m_order = 2);

// z Phi = <M_0 Phi_1*, Phi> Psi_1^0 + <M_0 Phi_2*, Phi> Psi_2^0 - G_0^0 v Phi.
template <typename T>
PolyTailSequence<T> reconstruct(const ProjectionChain<T>& chain, const Vec<T>& phi);

template <typename T>
struct NamedSequence {
  std::string name;
  PolyTailSequence<T> seq;
};

template <typename T>
struct ThresholdReport {
  ThresholdType type = ThresholdType::Regular;
  Stage stage = Stage::P;
  std::string label;  // i .. xii
  int d0 = 0, d = 0, dtilde = 0, dqs = 0;
  int threshold = 0;         // 0, or 4 for the reflected problem
  bool exact = is_exact_v<T>;
  bool trivial_auxiliary = false;  // rank V = 0: case i holds with Phi_1 = 0 vacuously
  std::array<bool, 5> nonzero{};
  T delta = 0;
  std::vector<PolyTailSequence<T>> E;  // orthogonal basis of the bound states
  Mat<T> E_gram;
  std::vector<NamedSequence<T>> etilde_mod_E, e_mod_E, qs_mod_E;
};

template <typename T>
ThresholdReport<T> classify(const ProjectionChain<T>& chain);

template <typename T>
ThresholdReport<T> classify(const FactorizedPotential<T>& pot) {
  return classify(build_chain(pot));
}

// dim ker M_0, dim ker(1 + U (M_0 - U)) (the finite form of 1 + G_0^0 V), and the
// dimension of z(ker M_0), which is the quasi-symmetric space. All three agree.
struct CircularDims {
  int ker_m0 = 0, ker_reduced = 0, qs_image = 0;
  bool equal() const { return ker_m0 == ker_reduced && ker_m0 == qs_image; }
};

template <typename T>
CircularDims circular_isomorphism_check(const ProjectionChain<T>& chain);

struct MultiplicativeBounds {
  bool d0_zero = false, dtilde_at_most_2 = false, d_at_most_1 = false;
  bool all() const { return d0_zero && dtilde_at_most_2 && d_at_most_1; }
};

// Dimension bounds of a diagonal potential; DomainError for non-multiplicative input.
template <typename T>
MultiplicativeBounds multiplicative_dimension_check(const PotentialSpec& spec);

// Label (i..xii) from the vanishing pattern of Phi_1..Phi_4 and Delta.
std::string case_label(const std::array<bool, 5>& nonzero);

}  // namespace dtl
