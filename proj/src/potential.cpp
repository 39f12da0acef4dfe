#include "dtl/potential.hpp"

namespace dtl {

Mat<Rational> PotentialSpec::dense_matrix(long lo, long hi) const {
  const Index n = hi - lo + 1;
  Mat<Rational> out = Mat<Rational>::Zero(n, n);
  for (const auto& t : terms)
    for (long i = lo; i <= hi; ++i)
      for (long k = lo; k <= hi; ++k) out(i - lo, k - lo) += Rational(t.sign) * t.weight * t.vector[i] * t.vector[k];
  return out;
}

PotentialSpec multiplicative_potential(const std::map<long, Rational>& values) {
  PotentialSpec spec;
  spec.multiplicative = true;
  for (const auto& [n, value] : values) {
    if (value == 0) continue;
    PotentialTerm t;
    t.sign = value > 0 ? 1 : -1;
    t.weight = value > 0 ? value : Rational(-value);
    t.vector = CompactSequence<Rational>::unit(n);
    spec.terms.push_back(std::move(t));
  }
  return spec;
}

PotentialSpec reflected_potential(const PotentialSpec& spec) {
  PotentialSpec out = spec;
  for (auto& t : out.terms) {
    t.sign = -t.sign;
    t.vector = j_conjugate(t.vector);
  }
  if (!out.name.empty()) out.name += " (reflected)";
  return out;
}

}  // namespace dtl
