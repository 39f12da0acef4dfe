// Command-line front end: classify, eigenbasis, expand, verify, threshold4, kernel.
// Exit status 0 on success, 2 on FloatingAmbiguous, 1 on any other failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dtl/io.hpp"

namespace {

using namespace dtl;

struct RunConfig {
  std::string command;
  std::string input;
  std::optional<int> order;
  int threshold = 0;
  std::string mode = "auto";  // exact | float | auto
  std::string format = "json";
  std::string kappa_base = "1/16";
  int kappa_steps = 10;
  std::string sites = "-3,0,4";
};

std::vector<long> parse_sites(const std::string& text) {
  std::vector<long> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const long a = std::stol(text.substr(0, dots)), b = std::stol(text.substr(dots + 2));
      for (long n = a; n <= b; ++n) out.push_back(n);
    } else {
      std::size_t start = 0;
      while (start <= text.size()) {
        const auto comma = text.find(',', start);
        out.push_back(std::stol(text.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
  } catch (const std::exception&) {
    fail(ErrorKind::ParseError, "--sites expects a..b or a comma list, got " + text);
  }
  if (out.empty()) fail(ErrorKind::ParseError, "--sites selects no site");
  return out;
}

bool use_exact(const RunConfig& cfg, const PotentialSpec& spec) {
  if (cfg.mode == "exact") {
    if (!spec.exact_representable())
      fail(ErrorKind::DomainError, "a weight is not a rational square; rerun with --mode float");
    return true;
  }
  if (cfg.mode == "float") return false;
  return spec.exact_representable();
}

void emit(const RunConfig& cfg, const Json& j, const std::string& text) {
  if (cfg.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

template <typename T>
std::string report_text(const ThresholdReport<T>& rep) {
  std::ostringstream out;
  out << "threshold " << rep.threshold << ": " << type_name(rep.type) << "\n"
      << "case " << rep.label << " (stage " << stage_name(rep.stage) << ")"
      << (rep.trivial_auxiliary ? ", trivial auxiliary space" : "") << "\n"
      << "d0 = " << rep.d0 << ", d = " << rep.d << ", dtilde = " << rep.dtilde << ", dqs = " << rep.dqs << "\n";
  auto names = [&](const char* title, const std::vector<NamedSequence<T>>& list) {
    out << title << ":";
    for (const auto& n : list) out << " " << n.name;
    out << "\n";
  };
  names("Etilde/E", rep.etilde_mod_E);
  names("E-bounded/E", rep.e_mod_E);
  names("qs/E", rep.qs_mod_E);
  return out.str();
}

template <typename T>
int run_classify(const RunConfig& cfg, const PotentialSpec& spec, bool bases_only) {
  const ThresholdReport<T> rep =
      cfg.threshold == 4 ? threshold4_analysis<T>(spec) : classify(build_chain(FactorizedPotential<T>(spec)));
  Json j = report_to_json(rep);
  if (bases_only) {
    j = {{"threshold", rep.threshold}, {"bases", j.at("bases")}, {"dims", j.at("dims")}};
    if (cfg.threshold == 0) j["nullspace_oracle"] = nullspace_to_json(nullspace_oracle(spec));
  }
  emit(cfg, j, report_text(rep));
  return 0;
}

template <typename T>
int default_order(const ProjectionChain<T>& chain, const RunConfig& cfg) {
  if (cfg.order) {
    if (*cfg.order < -2) fail(ErrorKind::DomainError, "--order must be at least -2");
    return *cfg.order;
  }
  return chain.case_id() == 4 ? 2 : 4;
}

template <typename T>
int run_expand(const RunConfig& cfg, const PotentialSpec& spec) {
  const ProjectionChain<T> chain = build_chain(FactorizedPotential<T>(spec));
  const ExpansionResult<T> G = expand(chain, default_order(chain, cfg));
  const long pad = 10;
  const long lo = chain.pot.empty() ? -pad : chain.pot.support_lo() - pad;
  const long hi = chain.pot.empty() ? pad : chain.pot.support_hi() + pad;
  const Json j = expansion_to_json(G, lo, hi);
  std::ostringstream text;
  text << "case " << G.case_id << ", orders " << G.j_min << ".." << G.order << " in powers of kappa\n";
  for (const auto& [k, c] : j.at("coefficients").items())
    text << k << ": " << (c.at("zero").template get<bool>() ? "zero" : std::to_string(c.at("correction").size()) + " correction terms")
         << "\n";
  emit(cfg, j, text.str());
  return 0;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

template <typename T>
int run_verify(const RunConfig& cfg, const PotentialSpec& spec) {
  const ProjectionChain<T> chain = build_chain(FactorizedPotential<T>(spec));
  const int N = default_order(chain, cfg);
  const ExpansionResult<T> G = expand(chain, N);
  std::vector<Check> checks;
  auto attempt = [&](const std::string& name, auto&& body) {
    try {
      checks.push_back({name, true, body()});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::FloatingAmbiguous) throw;
      checks.push_back({name, e.kind() == ErrorKind::NotApplicable, std::string(kind_name(e.kind())) + ": " + e.what()});
    }
  };
  const T scale = std::max<T>(chain.scale, T(1));
  attempt("series_composition", [&] {
    const auto series = series_compose<T>(chain.pot, N, -8, 8);
    for (int j = G.j_min; j <= N; ++j)
      if (!nearly_equal(G.get(j).window(-8, 8), series.at(j), scale))
        fail(ErrorKind::IdentityViolated, "G_" + std::to_string(j) + " differs from the series composition");
    return std::string("orders ") + std::to_string(G.j_min) + ".." + std::to_string(N) + " agree on [-8,8]^2";
  });
  attempt("singular_parts", [&] {
    const SingularParts<T> sp = singular_parts(chain);
    std::vector<std::pair<int, const ExpansionCoefficient<T>*>> parts = {{-2, &sp.g_m2}, {-1, &sp.g_m1}};
    if (sp.g0 && N >= 0) parts.push_back({0, &*sp.g0});
    for (const auto& [j, g] : parts)
      if (j <= N && !nearly_equal(G.get(j).window(-8, 8), g->window(-8, 8), scale))
        fail(ErrorKind::IdentityViolated, "closed form of G_" + std::to_string(j) + " differs from the master sum");
    return std::string("closed forms agree");
  });
  if (N >= 0) {
    attempt("green_identity", [&] {
      const auto rep = green_identity_check(chain, G);
      return std::string("H G_0 e_a = e_a - G_{-2} e_a for a in [-10,10]") + (rep.mod_b0_checked ? ", growth of G_0 checked" : "");
    });
    attempt("g0_closed_form", [&] {
      const auto cf = g0_closed_forms(chain, G);
      if (!cf.matches) fail(ErrorKind::IdentityViolated, cf.variant + " closed form differs, residual " + to_string(cf.max_residual));
      return cf.variant + " closed form agrees";
    });
  }
  SlopeGrid grid;
  grid.kappa_base = parse_rational(cfg.kappa_base);
  grid.steps = cfg.kappa_steps;
  const SlopeReport slope = remainder_slope(spec, G, N, parse_sites(cfg.sites), grid);
  checks.push_back({"remainder_slope", slope.pass, "expected slope " + std::to_string(N + 1)});

  bool pass = true;
  Json list = Json::array();
  std::ostringstream text;
  for (const auto& c : checks) {
    pass = pass && c.pass;
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    text << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  }
  for (const auto& e : slope.entries)
    text << "  slope(" << e.a << "," << e.b << ") = " << e.slope << ", max residual " << e.max_residual << (e.pass ? "" : "  FAIL") << "\n";
  emit(cfg, {{"case", G.case_id}, {"order", N}, {"checks", list}, {"slope", slope_to_json(slope)}, {"pass", pass}}, text.str());
  return pass ? 0 : 1;
}

int run(const RunConfig& cfg) {
  if (cfg.command == "kernel") {
    const int j_max = cfg.order.value_or(3);
    const Json j = kernel_table_json(j_max, 10);
    std::ostringstream text;
    for (int k = -1; k <= j_max; ++k) {
      text << "G_" << k << "^0(n), n = 0..10:";
      for (long n = 0; n <= 10; ++n) text << " " << to_string(g0_kernel<Rational>(k, n));
      text << "\n";
    }
    emit(cfg, j, text.str());
    return 0;
  }
  if (cfg.input.empty()) fail(ErrorKind::ParseError, "an input potential file is required");
  const PotentialSpec spec = load_potential(cfg.input);
  const bool exact = use_exact(cfg, spec);
  if (cfg.command == "classify" || cfg.command == "threshold4" || cfg.command == "eigenbasis") {
    RunConfig c = cfg;
    if (cfg.command == "threshold4") c.threshold = 4;
    const bool bases = cfg.command == "eigenbasis";
    return exact ? run_classify<Rational>(c, spec, bases) : run_classify<double>(c, spec, bases);
  }
  if (cfg.threshold == 4) fail(ErrorKind::DomainError, cfg.command + " works at threshold 0 only");
  if (cfg.command == "expand") return exact ? run_expand<Rational>(cfg, spec) : run_expand<Real50>(cfg, spec);
  if (cfg.command == "verify") return exact ? run_verify<Rational>(cfg, spec) : run_verify<Real50>(cfg, spec);
  fail(ErrorKind::ParseError, "unknown command " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold analysis of discrete Schroedinger operators with finite-rank potentials"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto add = [&](const std::string& name, const std::string& help, bool needs_input) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (needs_input) sub->add_option("input", cfg.input, "potential file (JSON or TOML)")->required();
    sub->add_option("--order", cfg.order, "expansion order N")->allow_extra_args(false);
    sub->add_option("--threshold", cfg.threshold, "threshold 0 or 4")->check(CLI::IsMember({0, 4}));
    sub->add_option("--mode", cfg.mode, "exact | float | auto")->check(CLI::IsMember({"exact", "float", "auto"}));
    sub->add_option("--format", cfg.format, "json | text")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--kappa-base", cfg.kappa_base, "largest kappa of the slope grid, as p/q");
    sub->add_option("--kappa-steps", cfg.kappa_steps, "number of halvings of kappa");
    sub->add_option("--sites", cfg.sites, "sites for slope fits: a..b or a,b,c");
    sub->callback([&cfg, name] { cfg.command = name; });
  };
  add("classify", "classify threshold 0 (or 4 with --threshold 4)", true);
  add("eigenbasis", "bases of the generalized eigenspaces", true);
  add("expand", "Laurent coefficients G_j of the resolvent", true);
  add("verify", "cross-check the expansion and fit remainder slopes", true);
  add("threshold4", "classify threshold 4 through the reflected potential", true);
  add("kernel", "table of the free kernels G_j^0", false);
  CLI11_PARSE(app, argc, argv);
  try {
    return run(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::FloatingAmbiguous ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
