#pragma once

#include "dtl/potential.hpp"

namespace dtl {

template <typename T>
FactorizedPotential<T>::FactorizedPotential(const PotentialSpec& spec) {
  for (const auto& term : spec.terms) {
    if (term.sign != 1 && term.sign != -1) fail(ErrorKind::DomainError, "potential signs must be +1 or -1");
    if (term.weight <= 0) fail(ErrorKind::DomainError, "potential weights must be positive");
    const T root = sqrt_of<T>(term.weight);
    std::vector<T> values;
    for (const auto& q : term.vector.values()) values.push_back(from_rational<T>(q) * root);
    v_.emplace_back(term.vector.first(), std::move(values));
    signs_.push_back(term.sign);
  }
  validate();
}

template <typename T>
FactorizedPotential<T>::FactorizedPotential(std::vector<CompactSequence<T>> vectors, std::vector<int> signs)
    : v_(std::move(vectors)), signs_(std::move(signs)) {
  if (v_.size() != signs_.size()) fail(ErrorKind::DomainError, "one sign per vector");
  for (int s : signs_)
    if (s != 1 && s != -1) fail(ErrorKind::DomainError, "potential signs must be +1 or -1");
  validate();
}

template <typename T>
void FactorizedPotential<T>::validate() {
  if (v_.empty()) return;
  lo_ = v_.front().first();
  hi_ = v_.front().last();
  scale_ = 1;
  for (const auto& v : v_) {
    if (v.empty()) fail(ErrorKind::DependentVectors, "zero vector in the factorisation");
    lo_ = std::min(lo_, v.first());
    hi_ = std::max(hi_, v.last());
    scale_ = std::max<T>(scale_, pair(v, v));
  }
  const Index r = rank();
  Mat<T> gram(r, r);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < r; ++b) gram(a, b) = pair(vector(a), vector(b));
  if (dtl::rank<T>(gram, scale_) != r) fail(ErrorKind::DependentVectors, "vectors v_a are linearly dependent");
}

template <typename T>
Mat<T> FactorizedPotential<T>::U() const {
  Mat<T> u = Mat<T>::Zero(rank(), rank());
  for (Index a = 0; a < rank(); ++a) u(a, a) = T(sign(a));
  return u;
}

template <typename T>
CompactSequence<T> FactorizedPotential<T>::combine(const Vec<T>& c) const {
  CompactSequence<T> out;
  for (Index a = 0; a < rank(); ++a)
    if (c(a) != 0) out = out + vector(a) * c(a);
  return out;
}

template <typename T>
Vec<T> FactorizedPotential<T>::adjoint(const PolyTailSequence<T>& x) const {
  Vec<T> out(rank());
  for (Index a = 0; a < rank(); ++a) out(a) = pair(vector(a), x);
  return out;
}

template <typename T>
Vec<T> FactorizedPotential<T>::moment(int k) const {
  std::vector<T> c(static_cast<std::size_t>(k) + 1, T(0));
  c.back() = 1;
  return adjoint(PolyTailSequence<T>::polynomial(Poly<T>(c)));
}

template <typename T>
CompactSequence<T> apply_v(const FactorizedPotential<T>& pot, const PolyTailSequence<T>& x) {
  Vec<T> c = pot.adjoint(x);
  for (Index a = 0; a < pot.rank(); ++a) c(a) *= T(pot.sign(a));
  return pot.combine(c);
}

template <typename T>
PolyTailSequence<T> apply_h(const FactorizedPotential<T>& pot, const PolyTailSequence<T>& x) {
  return apply_h0(x) + PolyTailSequence<T>(apply_v(pot, x));
}

template <typename T>
std::vector<Mat<T>> m_coefficients(const FactorizedPotential<T>& pot, int j_max) {
  const Index r = pot.rank();
  std::vector<Mat<T>> out;
  for (int j = -1; j <= j_max; ++j) {
    Mat<T> m(r, r);
    for (Index b = 0; b < r; ++b) {
      const PolyTailSequence<T> g = apply_g0<T>(j, pot.vector(b));
      for (Index a = 0; a < r; ++a) m(a, b) = pair(pot.vector(a), g);
    }
    if (j == 0) m += pot.U();
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace dtl

#define DTL_INSTANTIATE_POTENTIAL(T)                                                              \
  template class dtl::FactorizedPotential<T>;                                                     \
  template dtl::CompactSequence<T> dtl::apply_v<T>(const FactorizedPotential<T>&,                  \
                                                   const PolyTailSequence<T>&);                    \
  template dtl::PolyTailSequence<T> dtl::apply_h<T>(const FactorizedPotential<T>&,                 \
                                                    const PolyTailSequence<T>&);                   \
  template std::vector<dtl::Mat<T>> dtl::m_coefficients<T>(const FactorizedPotential<T>&, int);
