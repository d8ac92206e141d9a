#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hypflow/classifier.hpp"

namespace hypflow {

using ParamMap = std::map<std::string, double>;

struct Pressure {
  std::function<double(double)> p, dp, ddp;
  static Pressure cubic();  // p(u) = u³/3 − u
};

SystemSpec burgers1d(std::function<double(const Vec& u)> b, std::function<Vec(const Vec& u)> F);
SystemSpec burgers1d(double b = 1.0, double F2 = 1.0);
SystemSpec burgers2d(std::function<double(const Vec& u)> b, std::function<Vec(const Vec& u)> F);
SystemSpec van_der_waals(const Pressure& p = Pressure::cubic());
SystemSpec kgz(double alpha, double c);
// Symmetric control system A = [[u₁,u₂],[u₂,u₁]], F = (0, F2).
SystemSpec symmetric_control(double F2 = 1.0);
// ξ·[[0,1],[x²t − t² + t³a(x), 0]].
SystemSpec degenerate_symbol_ex_not(std::function<double(double x)> a);
// [[0,1],[±t,0]].
SystemSpec model_block(int sign);

// (u,v,n,m) ↦ (ũ,ṽ,ñ,m̃) and back; α must be zero.
Vec kgz_semilinear_conjugation(const Vec& U, double alpha, double c);
Vec kgz_semilinear_inverse(const Vec& Ut, double alpha, double c);
// The semilinear system satisfied by the transformed variables.
SystemSpec kgz_semilinear_system(double c);

struct ReferenceState {
  std::string name;
  std::string description;
  ReferenceSolution phi;
  SearchRegion region;
  Regime expected = Regime::Indeterminate;
};

struct ExampleRegistryEntry {
  std::string name;
  std::string citation;
  std::string description;
  ParamMap defaults;
  std::vector<std::string> state_names;  // the first one is the default
  std::function<SystemSpec(const ParamMap&)> factory;
  std::function<ReferenceState(const std::string& state, const ParamMap&)> state;
};

const std::vector<ExampleRegistryEntry>& example_registry();
const ExampleRegistryEntry& find_example(const std::string& name);
// Defaults overlaid with the given overrides; unknown keys rejected.
ParamMap merge_params(const ExampleRegistryEntry& e, const ParamMap& overrides);

// Uniform 1D grid of n points on [−π, π) containing 0.
std::vector<Vec> periodic_grid_1d(int n = 16);

}  // namespace hypflow
