#pragma once

// Finite-rank potentials V = sum_a sign_a <v_a, .> v_a = v U v*.
//
// PotentialSpec keeps the input data in rational form: each term is
// sign * weight * <u, .> u with rational weight > 0 and rational u, so that
// v_a = sqrt(weight) u. A PotentialSpec is exact when every weight is a rational
// square; otherwise it can only be factorised in a floating scalar.

#include <map>
#include <vector>

#include "dtl/free_resolvent.hpp"
#include "dtl/linalg.hpp"
#include "dtl/sequence.hpp"

namespace dtl {

struct PotentialTerm {
  int sign = 1;
  Rational weight = 1;
  CompactSequence<Rational> vector;
};

struct PotentialSpec {
  std::vector<PotentialTerm> terms;
  bool multiplicative = false;  // built from a diagonal V[n]
  std::string name;

  bool exact_representable() const {
    for (const auto& t : terms)
      if (!exact_sqrt(t.weight)) return false;
    return true;
  }
  // Kernel of V restricted to the window covering its support.
  Mat<Rational> dense_matrix(long lo, long hi) const;
};

// Diagonal potential; zero entries are dropped.
PotentialSpec multiplicative_potential(const std::map<long, Rational>& values);

// Potential of H0 - J V J^{-1}: every vector alternates sign, every sign flips.
PotentialSpec reflected_potential(const PotentialSpec& spec);

template <typename T>
class FactorizedPotential {
 public:
  FactorizedPotential() = default;
  explicit FactorizedPotential(const PotentialSpec& spec);
  FactorizedPotential(std::vector<CompactSequence<T>> vectors, std::vector<int> signs);

  Index rank() const { return static_cast<Index>(v_.size()); }
  const CompactSequence<T>& vector(Index a) const { return v_[static_cast<std::size_t>(a)]; }
  const std::vector<CompactSequence<T>>& vectors() const { return v_; }
  int sign(Index a) const { return signs_[static_cast<std::size_t>(a)]; }
  Mat<T> U() const;
  long support_lo() const { return lo_; }
  long support_hi() const { return hi_; }
  bool empty() const { return v_.empty(); }
  // Reference magnitude for floating vanishing tests.
  T scale() const { return scale_; }

  // v c = sum_a c_a v_a.
  CompactSequence<T> combine(const Vec<T>& c) const;
  // v* x = (<v_a, x>)_a.
  Vec<T> adjoint(const PolyTailSequence<T>& x) const;
  // v* n^k.
  Vec<T> moment(int k) const;

 private:
  void validate();
  std::vector<CompactSequence<T>> v_;
  std::vector<int> signs_;
  long lo_ = 0, hi_ = -1;
  T scale_ = 1;
};

template <typename T>
CompactSequence<T> apply_v(const FactorizedPotential<T>& pot, const PolyTailSequence<T>& x);

template <typename T>
PolyTailSequence<T> apply_h(const FactorizedPotential<T>& pot, const PolyTailSequence<T>& x);

// M_j = v* G_j^0 v for j != 0 and M_0 = U + v* G_0^0 v, returned for j = -1..j_max
// (entry j + 1).
template <typename T>
std::vector<Mat<T>> m_coefficients(const FactorizedPotential<T>& pot, int j_max);

}  // namespace dtl
