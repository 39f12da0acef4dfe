#pragma once

#include <map>

#include "dtl/threshold.hpp"

namespace dtl {

namespace detail {

template <typename T>
Vec<T> dual_vector(const Vec<T>& phi, bool nonzero) {
  if (!nonzero) return Vec<T>::Zero(phi.size());
  return phi / phi.squaredNorm();
}

template <typename T>
bool vector_nonzero(const Vec<T>& phi, const T& scale, const char* what) {
  return !is_zero<T>(phi.size() == 0 ? T(0) : max_abs(phi), scale, what);
}

template <typename T>
void expect(bool ok, const char* identity) {
  if (!ok) fail(ErrorKind::ChainInconsistent, std::string("identity violated: ") + identity);
}

}  // namespace detail

template <typename T>
ProjectionChain<T> build_chain(const FactorizedPotential<T>& pot, int m_order) {
  ProjectionChain<T> c;
  c.pot = pot;
  c.dim = pot.rank();
  const Index r = c.dim;
  const Mat<T> I = Mat<T>::Identity(r, r);
  c.U = pot.U();
  c.M = m_coefficients<T>(pot, std::max(m_order, 2));
  c.scale = pot.scale();
  for (const auto& m : c.M)
    if (m.size() > 0) c.scale = std::max<T>(c.scale, max_abs(m));
  const T& sc = c.scale;
  for (const auto& m : c.M) require_symmetric<T>(m, sc, "M_j");
  const Mat<T> M0 = c.m_coeff(0), M1 = c.m_coeff(1), M2 = c.m_coeff(2);

  c.psi1 = ones<T>();
  c.phi1 = pot.moment(0);
  c.n_moment = pot.moment(1);
  c.nonzero[0] = detail::vector_nonzero<T>(c.phi1, sc, "Phi_1");
  c.phi1s = detail::dual_vector<T>(c.phi1, c.nonzero[0]);
  if (c.nonzero[0]) {
    c.gamma = T(2) / c.phi1.squaredNorm();
    c.P = c.phi1 * c.phi1s.transpose();
  } else {
    c.gamma = 0;
    c.P = Mat<T>::Zero(r, r);
  }
  c.Q = I - c.P;
  const Mat<T> A0 = c.Q + c.P * c.gamma;  // (Q + gamma^dagger P)^{-1}

  c.phi2 = c.Q * c.n_moment;
  c.nonzero[1] = detail::vector_nonzero<T>(c.phi2, sc, "Phi_2");
  c.phi2s = detail::dual_vector<T>(c.phi2, c.nonzero[1]);
  c.psi2 = identity_sequence<T>() - ones<T>() * T(c.phi1s.dot(c.n_moment));
  c.Ptilde = c.P + c.phi2 * c.phi2s.transpose();

  c.m0 = c.Q * M0 * c.Q;
  c.S = kernel_projector_within<T>(c.m0, c.Q, sc);
  c.m0_pinv = pinv_symmetric<T>(c.m0, sc);

  c.phi3 = c.S * M0 * c.phi1s * T(2);
  c.nonzero[2] = detail::vector_nonzero<T>(c.phi3, sc, "Phi_3");
  c.phi3s = detail::dual_vector<T>(c.phi3, c.nonzero[2]);
  const T c32 = c.phi3s.dot(c.phi2);
  c.phi4 = c.S * c.phi2 - c.phi3 * c32;
  c.nonzero[3] = detail::vector_nonzero<T>(c.phi4, sc, "Phi_4");
  c.phi4s = detail::dual_vector<T>(c.phi4, c.nonzero[3]);
  c.phi5 = (I - c.m0_pinv * M0) * c.phi1s;
  c.delta = c.phi1s.dot(M0 * c.phi5);
  c.nonzero[4] = !is_zero<T>(c.delta, sc, "Delta");
  c.phi6 = c.m0_pinv * c.phi2 + c.phi3s * T(T(2) * (c.phi5 - c.phi3s * T(2 * c.delta)).dot(c.phi2)) +
           c.phi5 * T(2 * c32);

  c.m1 = c.Q * M1 * c.Q - c.Q * M0 * A0 * M0 * c.Q;
  c.m2 = c.Q * M2 * c.Q - c.Q * M0 * A0 * M1 * c.Q - c.Q * M1 * A0 * M0 * c.Q +
         c.Q * M0 * A0 * M0 * A0 * M0 * c.Q;
  c.q0 = c.S * c.m1 * c.S;
  c.Tp = kernel_projector_within<T>(c.q0, c.S, sc);
  c.q0_pinv = pinv_symmetric<T>(c.q0, sc);
  c.q1 = c.S * c.m2 * c.S - c.S * c.m1 * (c.S + c.m0_pinv) * c.m1 * c.S;
  c.r0 = c.Tp * c.q1 * c.Tp;
  c.r0_pinv = pinv_symmetric<T>(c.r0, sc);

  const bool p_invertible = r == 0 || (r == 1 && c.nonzero[0]);
  if (p_invertible) {
    c.stage = Stage::P;
  } else if (rank<T>(c.S, sc) == 0) {
    c.stage = Stage::M0;
  } else if (rank<T>(c.Tp, sc) == 0) {
    c.stage = Stage::Q0;
  } else {
    c.stage = Stage::R0;
  }

  // Internal identities of the chain.
  const Mat<T> Z = Mat<T>::Zero(r, r);
  detail::expect<T>(nearly_equal(Mat<T>(c.Q * M0 * c.S), Z, sc), "Q M_0 S = 0");
  detail::expect<T>(nearly_equal(Mat<T>(c.Tp * M0), Z, sc), "T M_0 = 0");
  detail::expect<T>(nearly_equal(Mat<T>(c.Tp * M1 * c.Q), Z, sc), "T M_1 Q = 0");
  const Vec<T> s2 = c.S * c.phi2;
  const Mat<T> q0_closed = (s2 * s2.transpose() + c.phi3 * c.phi3.transpose()) / T(-2);
  detail::expect<T>(nearly_equal(c.q0, q0_closed, sc), "q_0 = -(<S Phi_2,.> S Phi_2 + <Phi_3,.> Phi_3)/2");
  detail::expect<T>(nearly_equal(Vec<T>(M0 * c.phi3), Vec<T>(c.phi1 * T(c.phi3.squaredNorm() / 2)), sc),
                    "M_0 Phi_3 = |Phi_3|^2 Phi_1 / 2");
  detail::expect<T>(nearly_equal(Vec<T>(M0 * c.phi4), Vec<T>::Zero(r), sc), "M_0 Phi_4 = 0");
  detail::expect<T>(nearly_equal(Vec<T>(M0 * c.phi5), Vec<T>(c.phi1 * c.delta + c.phi3 / T(2)), sc),
                    "M_0 Phi_5 = Delta Phi_1 + Phi_3 / 2");
  // With Phi_3 = 0 the Phi_3^* terms of Phi_6 drop out and a Phi_1 component survives.
  const Vec<T> m0_phi6 = c.phi2 - c.phi4 - (c.nonzero[2] ? Vec<T>::Zero(r) : Vec<T>(c.phi1 * T(c.phi5.dot(c.phi2))));
  detail::expect<T>(nearly_equal(Vec<T>(M0 * c.phi6), m0_phi6, sc), "M_0 Phi_6 = Phi_2 - Phi_4 - [Phi_3 = 0] <Phi_5,Phi_2> Phi_1");
  if (c.stage == Stage::R0) {
    detail::expect<T>(positive_definite_on<T>(Mat<T>(-c.r0), c.Tp, sc), "-r_0 positive definite on T K");
  }
  // T K = ker Ptilde cap ker M_0 once the chain reaches r_0; it is trivial before.
  Mat<T> stacked(2 * r, r);
  stacked << c.Ptilde, M0;
  const Index e_dim = kernel_basis<T>(stacked, sc).cols();
  detail::expect<T>(e_dim == (c.stage == Stage::R0 ? rank<T>(c.Tp, sc) : 0), "T K = ker Ptilde cap ker M_0");
  return c;
}

template <typename T>
PolyTailSequence<T> reconstruct(const ProjectionChain<T>& c, const Vec<T>& phi) {
  if (c.dim == 0) fail(ErrorKind::EmptyAuxiliarySpace, "the auxiliary space is trivial");
  const Mat<T> M0 = c.m_coeff(0);
  const T a = (M0 * c.phi1s).dot(phi);
  const T b = (M0 * c.phi2s).dot(phi);
  return c.psi1 * a + c.psi2 * b - apply_g0<T>(0, c.pot.combine(phi));
}

namespace detail {

struct BasisRow {
  std::vector<const char*> etilde, e, qs;
};

inline const BasisRow& basis_row(const std::string& label) {
  static const std::map<std::string, BasisRow> table = {
      {"i", {{"Psi1^0", "Psi2^0"}, {"Psi1^0"}, {}}},
      {"ii", {{"Psi5", "Psi2^0"}, {}, {"Psi5"}}},
      {"iii", {{"Psi5", "Psi2^0"}, {}, {}}},
      {"iv", {{"Psi1^0", "Psi6"}, {"Psi1^0"}, {}}},
      {"v", {{"Psi5", "Psi6"}, {}, {"Psi5"}}},
      {"vi", {{"Psi5", "Psi6"}, {}, {}}},
      {"vii", {{"Psi1^0", "Psi4"}, {"Psi1^0", "Psi4"}, {"Psi4"}}},
      {"viii", {{"Psi3", "Psi2^0"}, {"Psi3"}, {}}},
      {"ix", {{"Psi5", "Psi4"}, {"Psi4"}, {"Psi5", "Psi4"}}},
      {"x", {{"Psi5", "Psi4"}, {"Psi4"}, {"Psi4"}}},
      {"xi", {{"Psi3", "Psi6"}, {"Psi3"}, {}}},
      {"xii", {{"Psi3", "Psi4"}, {"Psi3", "Psi4"}, {"Psi4"}}},
  };
  return table.at(label);
}

inline bool label_allowed(Stage stage, const std::string& label) {
  static const std::map<std::string, int> index = {{"i", 1}, {"ii", 2},  {"iii", 3}, {"iv", 4},
                                                   {"v", 5}, {"vi", 6},  {"vii", 7}, {"viii", 8},
                                                   {"ix", 9}, {"x", 10}, {"xi", 11}, {"xii", 12}};
  const int k = index.at(label);
  switch (stage) {
    case Stage::P: return k <= 3;
    case Stage::M0: return k <= 6;
    case Stage::Q0: return k >= 7;
    default: return true;
  }
}

template <typename T>
PolyTailSequence<T> named_vector(const ProjectionChain<T>& c, const std::string& name) {
  if (name == "Psi1^0") return c.psi1;
  if (name == "Psi2^0") return c.psi2;
  if (name == "Psi3") return reconstruct(c, c.phi3);
  if (name == "Psi4") return reconstruct(c, c.phi4);
  if (name == "Psi5") return reconstruct(c, c.phi5);
  if (name == "Psi6") return reconstruct(c, c.phi6);
  fail(ErrorKind::DomainError, "unknown basis vector " + name);
}

template <typename T>
void require_eigenfunction(const ProjectionChain<T>& c, const PolyTailSequence<T>& psi, const std::string& name) {
  const PolyTailSequence<T> h = apply_h(c.pot, psi);
  bool ok = true;
  for (const auto* p : {&h.left(), &h.right()})
    for (const auto& a : p->coeffs()) ok = ok && vanishing<T>(a, c.scale) == Vanishing::Zero;
  for (long n = h.lo(); n <= h.hi() && ok; ++n) ok = vanishing<T>(h[n], c.scale) == Vanishing::Zero;
  if (!ok) fail(ErrorKind::IdentityViolated, "H " + name + " != 0");
}

}  // namespace detail

template <typename T>
ThresholdReport<T> classify(const ProjectionChain<T>& c) {
  ThresholdReport<T> rep;
  rep.stage = c.stage;
  rep.nonzero = c.nonzero;
  rep.delta = c.delta;
  rep.label = case_label(c.nonzero);
  rep.trivial_auxiliary = c.dim == 0;
  if (!detail::label_allowed(c.stage, rep.label))
    fail(ErrorKind::ChainInconsistent, "case " + rep.label + " cannot occur at stage " + stage_name(c.stage));

  if (c.stage == Stage::R0) {
    const Index r = c.dim;
    const Mat<T> range = kernel_basis<T>(Mat<T>(Mat<T>::Identity(r, r) - c.Tp), c.scale);
    std::vector<PolyTailSequence<T>> raw;
    for (Index k = 0; k < range.cols(); ++k) raw.push_back(reconstruct(c, Vec<T>(range.col(k))));
    for (std::size_t k = 0; k < raw.size(); ++k) {
      PolyTailSequence<T> e = raw[k];
      for (const auto& prev : rep.E) e = e - prev * T(pair(prev, raw[k]) / pair(prev, prev));
      for (const auto* t : {&e.left(), &e.right()})
        for (const auto& a : t->coeffs())
          if (vanishing<T>(a, c.scale) != Vanishing::Zero)
            fail(ErrorKind::ChainInconsistent, "bound state with nonzero tails");
      std::vector<T> core = e.core();
      core.front() = core.back() = T(0);
      rep.E.push_back(CompactSequence<T>(e.lo(), std::move(core)));
    }
    const Index d0 = static_cast<Index>(rep.E.size());
    rep.E_gram = Mat<T>(d0, d0);
    for (Index a = 0; a < d0; ++a)
      for (Index b = 0; b < d0; ++b) rep.E_gram(a, b) = pair(rep.E[a], rep.E[b]);
    for (const auto& e : rep.E) detail::require_eigenfunction(c, e, "E");
  }
  const auto& row = detail::basis_row(rep.label);
  auto fill = [&](const std::vector<const char*>& names, std::vector<NamedSequence<T>>& out) {
    for (const char* n : names) {
      NamedSequence<T> ns{n, detail::named_vector(c, n)};
      detail::require_eigenfunction(c, ns.seq, n);
      out.push_back(std::move(ns));
    }
  };
  fill(row.etilde, rep.etilde_mod_E);
  fill(row.e, rep.e_mod_E);
  fill(row.qs, rep.qs_mod_E);

  rep.d0 = static_cast<int>(rep.E.size());
  rep.dtilde = rep.d0 + static_cast<int>(rep.etilde_mod_E.size());
  rep.d = rep.d0 + static_cast<int>(rep.e_mod_E.size());
  rep.dqs = rep.d0 + static_cast<int>(rep.qs_mod_E.size());
  if (rep.d0 == 0)
    rep.type = rep.e_mod_E.empty() ? ThresholdType::Regular : ThresholdType::ExceptionalI;
  else
    rep.type = rep.e_mod_E.empty() ? ThresholdType::ExceptionalII : ThresholdType::ExceptionalIII;
  return rep;
}

template <typename T>
CircularDims circular_isomorphism_check(const ProjectionChain<T>& c) {
  CircularDims out;
  if (c.dim == 0) return out;
  const Index r = c.dim;
  const Mat<T> M0 = c.m_coeff(0);
  const Mat<T> K = kernel_basis<T>(M0, c.scale);
  out.ker_m0 = static_cast<int>(K.cols());
  out.ker_reduced = static_cast<int>(kernel_basis<T>(Mat<T>(Mat<T>::Identity(r, r) + c.U * (M0 - c.U)), c.scale).cols());
  if (K.cols() == 0) return out;
  // Affine tails are fixed by two sites past the cores, so sampling there keeps independence.
  std::vector<PolyTailSequence<T>> z;
  long lo = c.pot.support_lo(), hi = c.pot.support_hi();
  for (Index k = 0; k < K.cols(); ++k) {
    z.push_back(reconstruct(c, Vec<T>(K.col(k))));
    lo = std::min(lo, z.back().lo());
    hi = std::max(hi, z.back().hi());
  }
  Mat<T> samples(hi - lo + 5, K.cols());
  for (Index k = 0; k < K.cols(); ++k)
    for (long n = lo - 2; n <= hi + 2; ++n) samples(n - lo + 2, k) = z[static_cast<std::size_t>(k)][n];
  out.qs_image = static_cast<int>(rank<T>(samples, c.scale));
  return out;
}

template <typename T>
MultiplicativeBounds multiplicative_dimension_check(const PotentialSpec& spec) {
  if (!spec.multiplicative) fail(ErrorKind::DomainError, "multiplicative_dimension_check needs a diagonal potential");
  const ThresholdReport<T> rep = classify(build_chain(FactorizedPotential<T>(spec)));
  return {rep.d0 == 0, rep.dtilde <= 2, rep.d <= 1};
}

}  // namespace dtl

#define DTL_INSTANTIATE_THRESHOLD(T)                                                                   \
  template dtl::ProjectionChain<T> dtl::build_chain<T>(const FactorizedPotential<T>&, int);            \
  template dtl::PolyTailSequence<T> dtl::reconstruct<T>(const ProjectionChain<T>&, const Vec<T>&);     \
  template dtl::ThresholdReport<T> dtl::classify<T>(const ProjectionChain<T>&);                        \
  template dtl::CircularDims dtl::circular_isomorphism_check<T>(const ProjectionChain<T>&);            \
  template dtl::MultiplicativeBounds dtl::multiplicative_dimension_check<T>(const PotentialSpec&);
