#include <doctest.h>

#include "support.hpp"

using namespace dtl;
using dtl::test::q;
using dtl::test::Rng;

namespace {

using Seq = PolyTailSequence<Rational>;
using Chain = ProjectionChain<Rational>;
using Result = ExpansionResult<Rational>;

Chain chain_of(const PotentialSpec& spec) { return build_chain(FactorizedPotential<Rational>(spec)); }

PotentialSpec single_site() {
  PotentialSpec spec;
  spec.terms.push_back({1, Rational(1), CompactSequence<Rational>::unit(0)});
  return spec;
}

std::vector<PotentialSpec> exact_fixtures() {
  std::vector<PotentialSpec> out;
  for (const auto& name : dtl::test::fixture_names()) {
    PotentialSpec spec = dtl::test::fixture(name);
    if (spec.exact_representable()) out.push_back(std::move(spec));
  }
  return out;
}

Mat<Rational> stack_samples(const std::vector<Seq>& list, long lo, long hi) {
  Mat<Rational> out(hi - lo + 1, static_cast<Index>(list.size()));
  for (Index k = 0; k < out.cols(); ++k)
    for (long n = lo; n <= hi; ++n) out(n - lo, k) = list[static_cast<std::size_t>(k)][n];
  return out;
}

}  // namespace

TEST_SUITE("resolvent_expansion") {
  TEST_CASE("V = 0 leaves the free kernels") {
    const Result G = expand(chain_of(dtl::test::fixture("v_zero")), 4);
    CHECK(G.case_id == 1);
    CHECK(G.j_min == -1);
    for (int j = -1; j <= 4; ++j) {
      CHECK(G.at(j).free_part);
      CHECK(G.at(j).correction.empty());
      CHECK(G.at(j).entry(3, -2) == g0_kernel<Rational>(j, 5));
    }
  }

  TEST_CASE("single-site potential: G_-1 = 0 and the closed form of G_0") {
    const Result G = expand(chain_of(single_site()), 0);
    CHECK(G.at(-1).window(-6, 6) == Mat<Rational>::Zero(13, 13));
    for (long a = -6; a <= 6; ++a)
      for (long b = -6; b <= 6; ++b)
        CHECK(G.at(0).entry(a, b) == 1 + Rational(std::labs(a) + std::labs(b) - std::labs(a - b), 2));
  }

  TEST_CASE("truncation bookkeeping") {
    const Result G = expand(chain_of(single_site()), 1);
    CHECK(G.get(-3).window(-2, 2) == Mat<Rational>::Zero(5, 5));
    CHECK_THROWS_AS(G.get(2), Error);
  }

  TEST_CASE("third kind: G_-2 is the orthogonal projection onto E") {
    const PotentialSpec spec = dtl::test::fixture("b5_third_kind");
    const Chain c = chain_of(spec);
    const Result G = expand(c, 0);
    CHECK(G.case_id == 4);
    CHECK(G.j_min == -2);
    const long lo = -3, hi = 13;
    const Mat<Rational> P = G.at(-2).window(lo, hi);
    CHECK(P == Mat<Rational>(P.transpose()));
    CHECK(Mat<Rational>(P * P) == P);
    CHECK(rank<Rational>(P) == 2);
    const NullspaceResult ns = nullspace_oracle(spec);
    REQUIRE(ns.bound.size() == 2);
    const Mat<Rational> B = stack_samples(ns.bound, lo, hi);
    CHECK(Mat<Rational>(P * B) == B);
    // Outside the window every column vanishes, so the window holds the whole operator.
    CHECK(G.at(-2).apply(CompactSequence<Rational>::unit(-20)).compact());
    CHECK(G.at(-2).apply(CompactSequence<Rational>::unit(-20)).to_compact().empty());
  }

  TEST_CASE("first kind: G_-1 is rank one and positive along the resonance") {
    const Chain c = chain_of(dtl::test::fixture("b3_resonance_1"));
    const ThresholdReport<Rational> rep = classify(c);
    REQUIRE(rep.e_mod_E.size() == 1);
    const Result G = expand(c, 0);
    const Mat<Rational> W = G.at(-1).window(-8, 8);
    CHECK(rank<Rational>(W) == 1);
    CHECK(W == Mat<Rational>(W.transpose()));
    CHECK(W.trace() > 0);
    for (long a = -8; a <= 8; ++a) CHECK(W(a + 8, a + 8) >= 0);
    const Seq psi = rep.e_mod_E[0].seq;
    Mat<Rational> both(17, 2);
    for (long n = -8; n <= 8; ++n) both(n + 8, 0) = psi[n];
    for (long a = -8; a <= 8; ++a) {
      both.col(1) = W.col(a + 8);
      CHECK(rank<Rational>(both) == 1);
    }
  }

  TEST_CASE("range of G_-1 lies in the bounded solutions") {
    Rng rng(21);
    std::vector<PotentialSpec> specs = exact_fixtures();
    for (int it = 0; it < 20; ++it) specs.push_back(dtl::test::random_potential(rng));
    for (const auto& spec : specs) {
      CAPTURE(spec.name);
      const Chain c = chain_of(spec);
      const ThresholdReport<Rational> rep = classify(c);
      const Result G = expand(c, -1);
      std::vector<Seq> bounded(rep.E.begin(), rep.E.end());
      for (const auto& ns : rep.e_mod_E) bounded.push_back(ns.seq);
      std::vector<Seq> all = bounded;
      for (long a = -6; a <= 6; ++a) all.push_back(G.at(-1).apply(CompactSequence<Rational>::unit(a)));
      CHECK(rank<Rational>(stack_samples(all, -20, 20)) == rank<Rational>(stack_samples(bounded, -20, 20)));
    }
  }

  TEST_CASE("coefficients are symmetric and their tails are bounded in degree") {
    Rng rng(22);
    std::vector<PotentialSpec> specs = exact_fixtures();
    for (int it = 0; it < 20; ++it) specs.push_back(dtl::test::random_potential(rng));
    for (const auto& spec : specs) {
      CAPTURE(spec.name);
      const Chain c = chain_of(spec);
      const Result G = expand(c, 2);
      // Growth of G_j e_a is at most |n|^{j+k} with k = 1, 1, 2, 3 in cases 1..4.
      const int k = std::max(1, c.case_id() - 1);
      for (int j = G.j_min; j <= 2; ++j) {
        const Mat<Rational> W = G.at(j).window(-6, 6);
        CHECK(W == Mat<Rational>(W.transpose()));
        for (long a = -3; a <= 3; ++a) CHECK(G.at(j).apply(CompactSequence<Rational>::unit(a)).tail_degree() <= j + k);
      }
    }
  }

  TEST_CASE("dual path on random potentials") {
    Rng rng(23);
    for (int it = 0; it < 25; ++it) {
      const FactorizedPotential<Rational> pot(dtl::test::random_potential(rng));
      const Chain c = build_chain(pot);
      const Result G = expand(c, 1);
      const auto series = series_compose<Rational>(pot, 1, -6, 6);
      for (int j = G.j_min; j <= 1; ++j) CHECK(G.at(j).window(-6, 6) == series.at(j));
    }
  }

  TEST_CASE("closed-form singular parts agree with the master sums") {
    Rng rng(24);
    std::vector<PotentialSpec> specs = exact_fixtures();
    for (int it = 0; it < 30; ++it) specs.push_back(dtl::test::random_potential(rng));
    for (const auto& spec : specs) {
      CAPTURE(spec.name);
      const Chain c = chain_of(spec);
      const Result G = expand(c, 0);
      const SingularParts<Rational> sp = singular_parts(c);
      CHECK(sp.g_m2.window(-8, 8) == G.get(-2).window(-8, 8));
      CHECK(sp.g_m1.window(-8, 8) == G.at(-1).window(-8, 8));
      if (c.stage != Stage::R0) {
        REQUIRE(sp.g0.has_value());
        CHECK(sp.g0->window(-8, 8) == G.at(0).window(-8, 8));
        CHECK(sp.g_m2.window(-8, 8) == Mat<Rational>::Zero(17, 17));
      }
    }
    const SingularParts<Rational> e0 = singular_parts(chain_of(single_site()));
    CHECK(e0.g_m2.window(-4, 4) == Mat<Rational>::Zero(9, 9));
    CHECK(e0.g_m1.window(-4, 4) == Mat<Rational>::Zero(9, 9));
  }

  TEST_CASE("Green identities") {
    const Chain e0 = chain_of(single_site());
    const Result Ge = expand(e0, 0);
    CHECK(apply_h(e0.pot, Ge.at(0).apply(CompactSequence<Rational>::unit(5))) == Seq(CompactSequence<Rational>::unit(5)));

    const Chain b5 = chain_of(dtl::test::fixture("b5_third_kind"));
    const Result Gb = expand(b5, 0);
    const CompactSequence<Rational> e = CompactSequence<Rational>::unit(0);
    CHECK(apply_h(b5.pot, Gb.at(0).apply(e)) == Seq(e) - Gb.at(-2).apply(e));

    const Chain none = chain_of(dtl::test::fixture("v_zero"));
    for (long a = -3; a <= 3; ++a)
      CHECK(apply_h0(apply_g0<Rational>(0, CompactSequence<Rational>::unit(a))) == Seq(CompactSequence<Rational>::unit(a)));

    for (const auto& spec : exact_fixtures()) {
      CAPTURE(spec.name);
      const Chain c = chain_of(spec);
      CHECK_NOTHROW(green_identity_check(c, expand(c, 0)));
    }
  }

  TEST_CASE("closed forms of G_0") {
    const Chain e0 = chain_of(single_site());
    const auto cf = g0_closed_forms(e0, expand(e0, 0));
    CHECK(cf.variant == "inverse");
    CHECK(cf.matches);
    CHECK(cf.max_residual == 0);

    const Chain c3 = chain_of(dtl::test::fixture("case3_nonlocal_rank_two"));
    REQUIRE(c3.stage == Stage::Q0);
    const auto f3 = g0_closed_forms(c3, expand(c3, 0));
    CHECK(f3.variant == "fitted");
    CHECK(f3.matches);

    const Chain none = chain_of(dtl::test::fixture("v_zero"));
    const auto f0 = g0_closed_forms(none, expand(none, 0));
    CHECK(f0.matches);
    for (long a = -3; a <= 3; ++a) {
      const CompactSequence<Rational> x = CompactSequence<Rational>::unit(a);
      CHECK(f0.apply(x) == expand(none, 0).at(0).apply(x));
    }

    const Chain qs = chain_of(dtl::test::fixture("case1_quasi_symmetric"));
    const auto fq = g0_closed_forms(qs, expand(qs, 0));
    CHECK(fq.variant == "projected");
    CHECK(fq.matches);

    const Chain b5 = chain_of(dtl::test::fixture("b5_third_kind"));
    try {
      g0_closed_forms(b5, expand(b5, 0));
      FAIL("case 4 has no closed form");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotApplicable);
    }
  }
}
