#include "dtl/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dtl {

namespace {

Rational json_rational(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  fail(ErrorKind::ParseError, "expected a rational as \"p/q\" or an integer, got " + v.dump());
}

long json_site(const std::string& key) {
  std::size_t used = 0;
  long n = 0;
  try {
    n = std::stol(key, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != key.size() || key.empty()) fail(ErrorKind::ParseError, "site keys must be integers, got \"" + key + "\"");
  return n;
}

std::map<long, Rational> json_site_map(const Json& obj, const char* what) {
  if (!obj.is_object()) fail(ErrorKind::ParseError, std::string(what) + " must be an object keyed by site");
  std::map<long, Rational> out;
  for (const auto& [k, v] : obj.items()) out[json_site(k)] = json_rational(v);
  return out;
}

CompactSequence<Rational> compact_from_map(const std::map<long, Rational>& m) {
  if (m.empty()) return {};
  const long lo = m.begin()->first, hi = m.rbegin()->first;
  std::vector<Rational> values(static_cast<std::size_t>(hi - lo + 1), Rational(0));
  for (const auto& [n, v] : m) values[static_cast<std::size_t>(n - lo)] = v;
  return CompactSequence<Rational>(lo, std::move(values));
}

Json compact_to_json(const CompactSequence<Rational>& x) {
  Json out = Json::object();
  for (long n = x.first(); !x.empty() && n <= x.last(); ++n)
    if (x[n] != 0) out[std::to_string(n)] = to_string(x[n]);
  return out;
}

template <typename T>
Json poly_json(const Poly<T>& p) {
  Json out = Json::array();
  for (const auto& c : p.coeffs()) out.push_back(scalar_string(c));
  return out;
}

template <typename T>
Json named_list(const std::vector<NamedSequence<T>>& list) {
  Json out = Json::array();
  for (const auto& ns : list) out.push_back({{"name", ns.name}, {"sequence", sequence_to_json(ns.seq)}});
  return out;
}

}  // namespace

PotentialSpec potential_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::ParseError, "potential file must hold an object");
  const bool mult = j.contains("multiplicative"), terms = j.contains("rank_one_terms");
  if (mult == terms) fail(ErrorKind::ParseError, "exactly one of \"multiplicative\" and \"rank_one_terms\" is required");
  PotentialSpec spec;
  if (mult) {
    spec = multiplicative_potential(json_site_map(j.at("multiplicative"), "multiplicative"));
  } else {
    const Json& list = j.at("rank_one_terms");
    if (!list.is_array()) fail(ErrorKind::ParseError, "rank_one_terms must be an array");
    for (const auto& t : list) {
      PotentialTerm term;
      if (!t.contains("sign") || !t.at("sign").is_number_integer())
        fail(ErrorKind::ParseError, "every term needs an integer sign");
      term.sign = t.at("sign").get<int>();
      if (term.sign != 1 && term.sign != -1) fail(ErrorKind::ParseError, "sign must be +1 or -1");
      if (t.contains("weight")) term.weight = json_rational(t.at("weight"));
      if (term.weight <= 0) fail(ErrorKind::ParseError, "weight must be positive");
      if (!t.contains("vector")) fail(ErrorKind::ParseError, "every term needs a vector");
      term.vector = compact_from_map(json_site_map(t.at("vector"), "vector"));
      if (term.vector.empty()) fail(ErrorKind::ParseError, "zero vector in rank_one_terms");
      spec.terms.push_back(std::move(term));
    }
  }
  if (j.contains("name")) spec.name = j.at("name").get<std::string>();
  return spec;
}

Json potential_to_json(const PotentialSpec& spec) {
  Json out = Json::object();
  if (!spec.name.empty()) out["name"] = spec.name;
  if (spec.multiplicative) {
    Json m = Json::object();
    for (const auto& t : spec.terms) m[std::to_string(t.vector.first())] = to_string(Rational(t.sign) * t.weight);
    out["multiplicative"] = m;
    return out;
  }
  Json list = Json::array();
  for (const auto& t : spec.terms) {
    Json term = {{"sign", t.sign}, {"vector", compact_to_json(t.vector)}};
    if (t.weight != 1) term["weight"] = to_string(t.weight);
    list.push_back(term);
  }
  out["rank_one_terms"] = list;
  return out;
}

std::string resolve_fixture(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  std::vector<fs::path> dirs;
  if (const char* env = std::getenv("DTL_FIXTURES")) dirs.emplace_back(env);
  dirs.emplace_back(DTL_FIXTURE_DIR);
  const fs::path name = fs::path(path).filename();
  for (const auto& d : dirs)
    for (const fs::path& cand : {d / name, d / fs::path(name.string() + ".json")})
      if (fs::exists(cand)) return cand.string();
  fail(ErrorKind::ParseError, "no such potential file: " + path);
}

PotentialSpec load_potential(const std::string& path) {
  const std::string resolved = resolve_fixture(path);
  std::ifstream in(resolved);
  if (!in) fail(ErrorKind::ParseError, "cannot read " + resolved);
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  if (std::filesystem::path(resolved).extension() == ".toml") {
    j = parse_toml_subset(buf.str());
  } else {
    try {
      j = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
      fail(ErrorKind::ParseError, resolved + ": " + e.what());
    }
  }
  PotentialSpec spec = potential_from_json(j);
  if (spec.name.empty()) spec.name = std::filesystem::path(resolved).stem().string();
  return spec;
}

template <typename T>
Json sequence_to_json(const PolyTailSequence<T>& x) {
  Json core = Json::object();
  for (long n = x.lo(); n <= x.hi(); ++n) core[std::to_string(n)] = scalar_string(x[n]);
  return {{"core", core}, {"left_tail", poly_json(x.left())}, {"right_tail", poly_json(x.right())}};
}

template <typename T>
Json report_to_json(const ThresholdReport<T>& rep) {
  Json bases = Json::object();
  Json E = Json::array();
  for (const auto& e : rep.E) E.push_back(sequence_to_json(e));
  bases["E"] = E;
  bases["etilde_mod_E"] = named_list(rep.etilde_mod_E);
  bases["e_mod_E"] = named_list(rep.e_mod_E);
  bases["qs_mod_E"] = named_list(rep.qs_mod_E);
  Json vanish = {{"Phi1", !rep.nonzero[0]}, {"Phi2", !rep.nonzero[1]}, {"Phi3", !rep.nonzero[2]},
                 {"Phi4", !rep.nonzero[3]}, {"Delta", !rep.nonzero[4]}};
  Json c = {{"stage", stage_name(rep.stage)}, {"label", rep.label}};
  if (rep.trivial_auxiliary) c["note"] = "trivial auxiliary space";
  return {{"type", type_name(rep.type)},
          {"threshold", rep.threshold},
          {"case", c},
          {"dims", {{"d0", rep.d0}, {"d", rep.d}, {"dtilde", rep.dtilde}, {"dqs", rep.dqs}}},
          {"vanishing", vanish},
          {"Delta", scalar_string(rep.delta)},
          {"bases", bases},
          {"exact", rep.exact}};
}

template <typename T>
Json expansion_to_json(const ExpansionResult<T>& G, long lo, long hi) {
  Json coefs = Json::object();
  for (const auto& [j, g] : G.coefficients) {
    Json free = nullptr;
    if (g.free_part) {
      free = Json::array();
      for (const auto& c : kernel_polynomial(j)) free.push_back(to_string(c));
    }
    Json corr = Json::array();
    for (const auto& d : g.correction)
      corr.push_back({{"left", sequence_to_json(d.left)}, {"right", sequence_to_json(d.right)}, {"weight", scalar_string(d.weight)}});
    const T size = max_abs(g.window(lo, hi));
    coefs["G_" + std::to_string(j)] = {{"order", j},
                                       {"free_part", free},
                                       {"correction", corr},
                                       {"zero", vanishing<T>(size, T(1)) == Vanishing::Zero}};
  }
  return {{"case", G.case_id}, {"j_min", G.j_min}, {"order", G.order}, {"convention", "kappa"},
          {"zero_checked_on", {lo, hi}}, {"coefficients", coefs}};
}

Json slope_to_json(const SlopeReport& rep) {
  Json entries = Json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"a", e.a}, {"b", e.b}, {"slope", e.slope}, {"max_residual", e.max_residual}, {"pass", e.pass}});
  return {{"order", rep.order}, {"expected_slope", rep.order + 1}, {"kappas", rep.kappas}, {"entries", entries}, {"pass", rep.pass}};
}

Json nullspace_to_json(const NullspaceResult& res) {
  Json basis = Json::array();
  for (const auto& b : res.basis) basis.push_back(sequence_to_json(b));
  Json bound = Json::array();
  for (const auto& b : res.bound) bound.push_back(sequence_to_json(b));
  return {{"dims", {{"d0", res.d0}, {"d", res.d}, {"dtilde", res.dtilde}, {"dqs", res.dqs}}},
          {"basis", basis},
          {"bound_states", bound}};
}

Json kernel_table_json(int j_max, long n_max) {
  Json out = Json::object();
  for (int j = -1; j <= j_max; ++j) {
    Json poly = Json::array();
    for (const auto& c : kernel_polynomial(j)) poly.push_back(to_string(c));
    Json values = Json::array();
    for (long n = 0; n <= n_max; ++n) values.push_back(to_string(g0_kernel<Rational>(j, n)));
    out["G_" + std::to_string(j)] = {{"polynomial_in_abs_n", poly}, {"values", values}};
  }
  return out;
}

#define DTL_INSTANTIATE_IO(T)                                             \
  template Json sequence_to_json<T>(const PolyTailSequence<T>&);          \
  template Json report_to_json<T>(const ThresholdReport<T>&);             \
  template Json expansion_to_json<T>(const ExpansionResult<T>&, long, long);

DTL_INSTANTIATE_IO(Rational)
DTL_INSTANTIATE_IO(double)
DTL_INSTANTIATE_IO(Real50)

}  // namespace dtl
