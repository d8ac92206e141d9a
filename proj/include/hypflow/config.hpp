#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/example_systems.hpp"

namespace hypflow {

// Settings of one CLI run. Text form: `key = value` lines grouped under
// [example], [params], [experiment], [tolerances] and [output]; keys before the
// first section belong to the top level. JSON with the same nesting is also accepted.
struct RunConfig {
  std::string command;
  std::string example;
  std::string state;
  ParamMap params;                 // example parameter overrides
  std::vector<double> eps_ladder;  // empty means the command default
  std::map<std::string, double> experiment;
  double tol_eq = 1e-8, tol_margin = 1e-6;
  std::string out_dir;
  std::uint64_t seed = 0;

  std::optional<double> get(const std::string& key) const;
  double get_or(const std::string& key, double fallback) const;

  // Sorted-key JSON; parse(canonical()) reproduces canonical() exactly.
  std::string canonical() const;
  std::string canonical_compact() const;

  static RunConfig parse(const std::string& text);  // JSON if the first non-blank char is '{'
  static RunConfig parse_ini(const std::string& text);
  static RunConfig parse_json(const std::string& text);
  static RunConfig load(const std::string& path);

  // Rejects unknown experiment keys, non-positive ladders and parameter sets that
  // already violate the Hadamard gates independently of the growth rate.
  void validate() const;
};

const std::vector<std::string>& experiment_keys();

}  // namespace hypflow
