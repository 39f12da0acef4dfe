#pragma once

// Input parsing and JSON reports. Rationals are written as "p" or "p/q"
// strings; floating values as decimal strings. Object keys come out sorted.

#include <string>

#include <json.hpp>

#include "dtl/oracle.hpp"

namespace dtl {

using Json = nlohmann::json;

// {"multiplicative": {"n": value, ...}} or
// {"rank_one_terms": [{"sign": +-1, "vector": {"n": value, ...}, "weight": value}, ...]}
// with an optional "name". A missing weight means 1.
PotentialSpec potential_from_json(const Json& j);
Json potential_to_json(const PotentialSpec& spec);

// The TOML reader covers what potential files need: comments, bare or quoted
// keys, strings, integers, inline tables, [table] and [[array]] headers.
Json parse_toml_subset(const std::string& text);

// Parses by extension (.toml, otherwise JSON). Relative paths that do not exist
// are looked up in $DTL_FIXTURES, then in the bundled fixture directory.
PotentialSpec load_potential(const std::string& path);
std::string resolve_fixture(const std::string& path);

template <typename T>
std::string scalar_string(const T& x) {
  return to_string(x);
}

template <typename T>
Json sequence_to_json(const PolyTailSequence<T>& x);

template <typename T>
Json report_to_json(const ThresholdReport<T>& rep);

// Each coefficient lists its free kernel polynomial and correction dyads; "zero"
// is decided on sites [lo, hi].
template <typename T>
Json expansion_to_json(const ExpansionResult<T>& G, long lo, long hi);

Json slope_to_json(const SlopeReport& rep);
Json nullspace_to_json(const NullspaceResult& res);

// G_j^0(n) for j = -1..j_max and n = 0..n_max, with the polynomial coefficients.
Json kernel_table_json(int j_max, long n_max);

}  // namespace dtl
