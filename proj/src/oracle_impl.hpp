#pragma once

#include <cmath>

#include "dtl/oracle.hpp"

namespace dtl {

template <typename R>
Mat<R> resolvent_matrix(const FactorizedPotential<R>& pot, const R& kappa, const std::vector<long>& sites) {
  const Index r = pot.rank(), ns = static_cast<Index>(sites.size());
  Mat<R> out(ns, ns);
  for (Index i = 0; i < ns; ++i)
    for (Index k = 0; k < ns; ++k) out(i, k) = r0_point<R>(kappa, sites[i] - sites[k]);
  if (r == 0) return out;

  // (R0 v_p)[n] at the given sites n.
  auto r0v = [&](Index p, long n) {
    const CompactSequence<R>& v = pot.vector(p);
    R acc = 0;
    for (long k = v.first(); k <= v.last(); ++k) acc += r0_point<R>(kappa, n - k) * v[k];
    return acc;
  };
  Mat<R> M = pot.U();
  for (Index p = 0; p < r; ++p)
    for (Index q = 0; q < r; ++q) {
      const CompactSequence<R>& v = pot.vector(p);
      R acc = 0;
      for (long n = v.first(); n <= v.last(); ++n) acc += v[n] * r0v(q, n);
      M(p, q) += acc;
    }
  Eigen::JacobiSVD<Mat<R>> svd(M);
  const auto& sv = svd.singularValues();
  const R smallest = sv(sv.size() - 1);
  if (smallest == 0 || to_double(R(sv(0) / smallest)) > max_condition<R>())
    fail(ErrorKind::NearSingular, "M(kappa) is too badly conditioned at kappa = " + to_string(kappa));
  const Mat<R> Minv = M.fullPivLu().inverse();
  Mat<R> L(ns, r);
  for (Index i = 0; i < ns; ++i)
    for (Index p = 0; p < r; ++p) L(i, p) = r0v(p, sites[i]);
  out -= L * Minv * L.transpose();
  return out;
}

template <typename T>
SlopeReport remainder_slope(const PotentialSpec& spec, const ExpansionResult<T>& G, int N,
                            const std::vector<long>& sites, const SlopeGrid& grid) {
  const FactorizedPotential<Real50> pot(spec);
  SlopeReport rep;
  rep.order = N;
  const Index ns = static_cast<Index>(sites.size());
  const long lo = *std::min_element(sites.begin(), sites.end());
  const long hi = *std::max_element(sites.begin(), sites.end());
  std::map<int, Mat<Real50>> coef;
  for (int j = G.j_min; j <= N; ++j) {
    const Mat<T> w = G.get(j).window(lo, hi);
    Mat<Real50> c(ns, ns);
    for (Index i = 0; i < ns; ++i)
      for (Index k = 0; k < ns; ++k) c(i, k) = to_real50(w(sites[i] - lo, sites[k] - lo));
    coef[j] = c;
  }
  std::vector<Mat<Real50>> residual;
  Real50 kappa = from_rational<Real50>(grid.kappa_base);
  for (int k = 0; k <= grid.steps; ++k, kappa /= 2) {
    rep.kappas.push_back(to_double(kappa));
    Mat<Real50> acc = resolvent_matrix<Real50>(pot, kappa, sites);
    for (const auto& [j, c] : coef) {
      Real50 power = 1;
      for (int e = 0; e < std::abs(j); ++e) power *= kappa;
      acc -= c * (j < 0 ? Real50(1 / power) : power);
    }
    residual.push_back(acc);
  }
  for (Index i = 0; i < ns; ++i)
    for (Index k = 0; k < ns; ++k) {
      SlopeEntry e;
      e.a = sites[i];
      e.b = sites[k];
      std::vector<double> xs, ys;
      for (std::size_t s = 0; s < residual.size(); ++s) {
        const double v = to_double(Real50(abs(residual[s](i, k))));
        e.max_residual = std::max(e.max_residual, v);
        if (v > 0) {
          xs.push_back(std::log(rep.kappas[s]));
          ys.push_back(std::log(v));
        }
      }
      if (xs.size() >= 6) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t s = 0; s < xs.size(); ++s) {
          sx += xs[s];
          sy += ys[s];
          sxx += xs[s] * xs[s];
          sxy += xs[s] * ys[s];
        }
        e.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      } else {
        e.slope = std::numeric_limits<double>::infinity();
      }
      e.pass = e.slope >= N + 0.8 || e.max_residual < 1e-12;
      rep.pass = rep.pass && e.pass;
      rep.entries.push_back(e);
    }
  return rep;
}

template <typename T>
ThresholdReport<T> threshold4_analysis(const PotentialSpec& spec) {
  const FactorizedPotential<T> reflected(reflected_potential(spec));
  ThresholdReport<T> rep = classify(build_chain(reflected));
  rep.threshold = 4;
  for (auto& e : rep.E) e = PolyTailSequence<T>(j_conjugate(e));
  return rep;
}

}  // namespace dtl

#define DTL_INSTANTIATE_ORACLE_FLOAT(R)                                                                  \
  template dtl::Mat<R> dtl::resolvent_matrix<R>(const FactorizedPotential<R>&, const R&, const std::vector<long>&);

#define DTL_INSTANTIATE_ORACLE(T)                                                                        \
  template dtl::SlopeReport dtl::remainder_slope<T>(const PotentialSpec&, const ExpansionResult<T>&, int, \
                                                   const std::vector<long>&, const SlopeGrid&);         \
  template dtl::ThresholdReport<T> dtl::threshold4_analysis<T>(const PotentialSpec&);
