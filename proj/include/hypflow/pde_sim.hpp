#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hypflow/classifier.hpp"
#include "hypflow/semiclassical.hpp"

namespace hypflow {

struct SolverConfig {
  int n = 4096;
  double L = 2 * kPi;
  double origin = 0;
  double dt = 0;  // 0: chosen from the CFL number
  double t_end = 1;
  double cfl = 0.25;
  bool dealias = true;  // 2/3 rule
  bool filter = true;
  double filter_strength = 36;
  int filter_order = 8;
  double linf_cap = 1e6;
  double tail_cap = 1e-3;  // energy fraction in the top third of the resolved band
  int sample_every = 1;

  // dt·max|λ(A)|·n/L ≤ 0.5; throws ConfigError naming the bound otherwise.
  void check_cfl(double max_speed) const;
  double auto_dt(double max_speed) const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<GridFunction> u;
  bool breakdown = false;
  double breakdown_time = 0;
  double last_valid_time = 0;
  std::string reason;
  double dt = 0;
  long steps = 0;
};

// Largest |λ(A(t,x,u)·ξ)| over grid nodes, ξ the top resolved wavenumber direction.
double max_char_speed(const SystemSpec& sys, double t, const GridFunction& u);

struct BreakdownFlag {
  bool tripped = false;
  std::string reason;
};
BreakdownFlag breakdown_detector(const GridFunction& state, const SolverConfig& cfg);

// ∂_t u + A(t,x,u)∂_x u = F(t,x,u) on the periodic grid of u0 (real part is evolved).
Trajectory evolve(const SystemSpec& sys, const GridFunction& u0, const SolverConfig& cfg);

// Rescaled perturbation frame: ∂_t v + ε^{h−1}A(t, x₀+ε^{1−h}x, φ)∂_x v + Ḃv = 0, with
// Ḃv = Σ(∂_uA·v)∂_Xφ − ∂_uF·v. Physical time t. The x-mean of A at t = 0 is integrated exactly.
struct LinearizedFrame {
  double eps = 1e-2, h = 1;
  Vec x0 = vec1(0.0);
  bool include_B = true;
};
Trajectory evolve_linearized(const SystemSpec& sys, const ReferenceSolution& phi, const GridFunction& v0,
                             const LinearizedFrame& frame, const SolverConfig& cfg);

struct HadamardParams {
  double K = 0, alpha = 0.6, m = 2, delta = 1, T_star = 0;
  double h = 1, ell = 0;
  int d = 1;
  double gamma_minus = 0;  // γ⁻(0, ξ₀)
  double xi0 = 1;

  double K_prime() const;
  // Rejects violations of (2α−1)K > 2αm + (1−α)(1−h)d, 2K′ > K and γ⁻T⋆ > K.
  void validate() const;
  double T(double eps) const;  // (T⋆|log ε|)^{1/(1+ℓ)}
  // m = 2, α = 0.6, K the least integer satisfying the first gate, T⋆ = 1.5K/γ⁻.
  static HadamardParams defaults(double h, double ell, double gamma_minus, int d = 1);
};

struct HadamardRow {
  double eps = 0, T = 0;
  double numerator = 0, denominator = 0, ratio = 0;
  double growth_exponent = 0, predicted_exponent = 0;
  bool breakdown = false;
  double breakdown_time = 0;
  std::string breakdown_reason;
  int n = 0;
  double L = 0, dt = 0;
};

struct HadamardReport {
  std::vector<HadamardRow> rows;
  double log_slope = 0;    // d log ratio / d log ε
  double growth_factor = 0;  // ratio(ε_min)/ratio(ε_max)
  std::string verdict;     // "unstable", "stable" or "breakdown"
  double filter_strength = 0;
  int filter_order = 0;
  bool any_breakdown = false;
};

// Row of the instability table from two trajectories on a common grid and time axis.
HadamardRow hadamard_ratio(const Trajectory& u, const Trajectory& phi, const HadamardParams& p, double eps,
                           double x0);

struct ExperimentSetup {
  double x0 = 0;
  CVec ebar;                  // packet direction, default first unit vector
  double box_factor = 4;      // box length in units of δε^{1−h} when φ is homogeneous
  int min_nodes_per_wave = 8;
  int min_nodes_in_ball = 16;
  int workers = 0;  // ladder entries run concurrently; 0 uses the hardware thread count
};

HadamardReport run_instability_experiment(const SystemSpec& sys, const ReferenceSolution& phi,
                                          const Classification& cls, const HadamardParams& p,
                                          const std::vector<double>& ladder, const SolverConfig& cfg,
                                          const ExperimentSetup& setup = {});

struct FreeSolutionResult {
  double eps = 0, t_end = 0;
  double rel_error = 0;
  int n = 0, modes = 0;
  bool constant_coefficients = false;
};
// ‖v_lin(t) − op_ε(S(0;t))v(0)‖/‖v_lin(t)‖ with t in rescaled time (physical ε^h t).
// The packet carrier sits at ξ₀/ε^h in the rescaled frame; flip_flow reverses the sign of S's generator.
struct FreeSolutionSetup {
  double x0 = 0, xi0 = 1, delta = 1;
  CVec ebar;
  int n = 0;  // 0: chosen from the packet
  double L = 2 * kPi;
  int coarse_x = 16;
  bool flip_flow = false;
};
FreeSolutionResult free_solution_compare(const SystemSpec& sys, const ReferenceSolution& phi, double eps,
                                         const Classification& cls, double t_end, const SolverConfig& cfg,
                                         const FreeSolutionSetup& setup = {});

}  // namespace hypflow
