#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace dtl;
using dtl::test::q;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::DomainError;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("TOML subset") {
    const Json j = parse_toml_subset(R"(# comment
name = "toml_case"   # trailing comment

[[rank_one_terms]]
sign = -1
weight = "4/9"
vector = { "-1" = "1/2", 0 = 1, 2 = "-3" }

[[rank_one_terms]]
sign = 1
vector = { 3 = 2 }
)");
    CHECK(j.at("name") == "toml_case");
    REQUIRE(j.at("rank_one_terms").size() == 2);
    CHECK(j.at("rank_one_terms")[0].at("vector").at("-1") == "1/2");
    CHECK(j.at("rank_one_terms")[0].at("vector").at("0") == 1);
    const PotentialSpec spec = potential_from_json(j);
    CHECK(spec.terms[0].weight == q(4, 9));
    CHECK(spec.terms[0].vector[2] == -3);
    CHECK(spec.terms[1].vector == CompactSequence<Rational>(3, {q(2)}));

    const Json m = parse_toml_subset("[multiplicative]\n\"-1\" = 1\n0 = \"-2/3\"\n1 = 1\n");
    CHECK(potential_from_json(m).multiplicative);

    CHECK(kind_of([] { parse_toml_subset("a = 1.5\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_toml_subset("a = 1\na = 2\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_toml_subset("a = \"open\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_toml_subset("a = [1, 2\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { parse_toml_subset("v = { 3 = 2, }\n"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("TOML and JSON files load to the same potential") {
    const std::string toml = write_temp("dtl_io_b3.toml", "[multiplicative]\n\"-1\" = 1\n0 = -1\n1 = 1\n");
    const PotentialSpec a = load_potential(toml);
    const PotentialSpec b = dtl::test::fixture("b3_resonance_1");
    CHECK(a.name == "dtl_io_b3");
    CHECK(a.dense_matrix(-2, 2) == b.dense_matrix(-2, 2));
  }

  TEST_CASE("malformed potentials") {
    CHECK(kind_of([] { potential_from_json(Json::parse(R"({"rank_one_terms": [{"sign": 2, "vector": {"0": 1}}]})")); }) ==
          ErrorKind::ParseError);
    CHECK(kind_of([] { potential_from_json(Json::parse(R"({"rank_one_terms": [{"sign": 1, "vector": {"x": 1}}]})")); }) ==
          ErrorKind::ParseError);
    CHECK(kind_of([] { potential_from_json(Json::parse(R"({"rank_one_terms": [{"sign": 1, "vector": {"0": 0}}]})")); }) ==
          ErrorKind::ParseError);
    CHECK(kind_of([] {
            potential_from_json(Json::parse(R"({"rank_one_terms": [{"sign": 1, "weight": "-1", "vector": {"0": 1}}]})"));
          }) == ErrorKind::ParseError);
    CHECK(kind_of([] { potential_from_json(Json::parse(R"({"multiplicative": {}, "rank_one_terms": []})")); }) ==
          ErrorKind::ParseError);
    CHECK(kind_of([] { load_potential("no_such_fixture_anywhere"); }) == ErrorKind::ParseError);
  }

  TEST_CASE("canonical round trip of every fixture") {
    for (const auto& name : dtl::test::fixture_names()) {
      CAPTURE(name);
      const PotentialSpec spec = dtl::test::fixture(name);
      const Json once = potential_to_json(spec);
      const PotentialSpec back = potential_from_json(once);
      CHECK(potential_to_json(back).dump() == once.dump());
      const auto [lo, hi] = dtl::test::support(spec);
      CHECK(back.dense_matrix(lo, hi) == spec.dense_matrix(lo, hi));
      if (spec.exact_representable()) {
        const Json r1 = report_to_json(classify(FactorizedPotential<Rational>(spec)));
        const Json r2 = report_to_json(classify(FactorizedPotential<Rational>(back)));
        CHECK(r1.dump() == r2.dump());
      }
    }
  }

  TEST_CASE("reports are deterministic") {
    const PotentialSpec spec = dtl::test::fixture("b5_third_kind");
    const FactorizedPotential<Rational> pot(spec);
    const std::string a = report_to_json(classify(pot)).dump();
    const std::string b = report_to_json(classify(pot)).dump();
    CHECK(a == b);
    const Json rep = Json::parse(a);
    CHECK(rep.at("type") == "exceptional-3");
    CHECK(rep.at("case").at("label") == "vii");
    CHECK(rep.at("dims").at("d0") == 2);
    CHECK(rep.at("dims").at("dqs") == 3);
    CHECK(rep.at("exact") == true);
    const auto G = expand(pot, 0);
    CHECK(expansion_to_json(G, -5, 5).dump() == expansion_to_json(expand(pot, 0), -5, 5).dump());
    CHECK(expansion_to_json(G, -5, 5).at("coefficients").at("G_-2").at("zero") == false);
  }

  TEST_CASE("kernel table") {
    const Json t = kernel_table_json(3, 10);
    CHECK(t.at("G_1").at("values")[0] == "-1/16");
    CHECK(t.at("G_0").at("values")[4] == "-2");
    CHECK(t.at("G_-1").at("polynomial_in_abs_n")[0] == "1/2");
  }
}
