#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hypflow/types.hpp"

namespace hypflow {

// Normalized discrete transforms: fft gives û_k = n⁻¹ Σ_j u_j e^{−2πijk/n}, ifft inverts it.
CVec fft(const CVec& u);
CVec ifft(const CVec& uhat);

// Periodic uniform grid x_j = origin + jL/n, j < n, carrying N complex components per node.
struct GridFunction {
  int n = 0;
  double L = 2 * kPi;
  double origin = 0;
  CMat values;  // N × n

  GridFunction() = default;
  GridFunction(int comps, int nodes, double length, double x0 = 0);

  int comps() const { return static_cast<int>(values.rows()); }
  double dx() const { return L / n; }
  double x(int j) const { return origin + dx() * j; }
  double wavenumber(int k) const;  // 2π/L · k, k folded into (−n/2, n/2]
  int max_mode() const { return n / 2; }

  CMat modes() const;  // row-wise fft
  static GridFunction from_modes(const CMat& m, int nodes, double length, double x0);
  GridFunction derivative() const;  // spectral ∂_x

  double l2_norm() const;  // √(Σ|u_j|² L/n)
  double max_abs() const;

  void save_binary(std::ostream& os) const;
  static GridFunction load_binary(std::istream& is);
  void write_csv(std::ostream& os) const;
};

bool is_power_of_two(int n);

// Symbol a(x, ξ) of order m. With slow_x set, x enters as ε^{1−h}x.
struct SymbolSampler {
  std::function<CMat(double x, double xi)> a;
  double order = 0;
  bool slow_x = false;
  bool x_independent = false;

  CMat eval(double x, double xi, double eps, double h) const;
  static SymbolSampler multiplier(std::function<CMat(double xi)> f, double order = 0);
  static SymbolSampler constant(const CMat& c);
};

// op_ε(a)u(x) = Σ_k e^{ixξ_k} a(x, ε^hξ_k) û_k.
GridFunction op_eps_apply(const SymbolSampler& a, const GridFunction& u, double eps, double h);

// ‖(1 + |ε^hξ|²)^{s/2} û‖ with the discrete Parseval weight, so s = 0 gives l2_norm.
double eps_sobolev_norm(const GridFunction& u, double s, double eps, double h);

// θ ≡ 1 on |r| ≤ 1/2, θ = 0 for |r| ≥ δ, C^∞ in between.
double plateau_cutoff(double r, double delta = 1.0);

struct WavePacketSpec {
  double K = 0;
  double xi0 = 1;
  double x0 = 0;
  double delta = 1;
  double eps = 1e-2, h = 1;
  std::function<CVec(double y)> ebar;  // unit direction, rescaled variable y
  const SymbolSampler* Qinv = nullptr; // optional, in the rescaled frame
  int comps = 1;
  int n = 1024;
  double L = 2 * kPi;
  double origin = 0;
  bool real_part = true;
  int min_nodes_per_wave = 8;
  int min_nodes_in_ball = 16;
};
// ε^K φ₀((x − x₀)/ε^{1−h}) with φ₀ = Re(op_ε(Q⁻¹)(e^{iyξ₀/ε^h}θ(y)ē(y))).
GridFunction build_wavepacket(const WavePacketSpec& spec);
// Node count for which a packet at scale ε is resolved on a box of length L.
int wavepacket_nodes(double xi0, double eps, double h, double delta, double L, int min_per_wave = 8,
                     int min_in_ball = 16);

struct CompositionReport {
  std::vector<double> eps, residual;
  double order = 0;
};
// ‖(op(a)op(b) − op(ab))u‖/‖u‖.
double composition_residual(const SymbolSampler& a, const SymbolSampler& b, double eps, double h,
                            const GridFunction& u);
CompositionReport composition_order(const SymbolSampler& a, const SymbolSampler& b, const std::vector<double>& ladder,
                                    double h, const std::function<GridFunction(double eps)>& probe);

// max over probes of ‖op_ε(a)u‖/‖u‖_{ε,−m}; a lower estimate of the operator norm.
double operator_norm_estimate(const SymbolSampler& a, double eps, double h, const std::vector<GridFunction>& probes);

}  // namespace hypflow
