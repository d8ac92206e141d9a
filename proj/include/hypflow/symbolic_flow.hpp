#pragma once

#include <functional>
#include <vector>

#include "hypflow/branching.hpp"

namespace hypflow {

struct FlowConfig {
  double eps = 1e-3;
  double ell = 0, h = 1, zeta = 0;
  double T_star = 1;
  double delta = 0.1;
  double rtol = 1e-10, atol = 1e-14;
  double max_step = 0;  // 0 means 0.01·ε^{1−h}
  int max_halvings = 60;
  bool check_flow = true;

  double T() const;  // (T⋆|log ε|)^{1/(1+ℓ)}
  double step_cap() const;
  void validate() const;
  static FlowConfig for_ell(double eps, double ell);
};

// t ↦ A⋆(ε, t, x, ξ) at fixed (x, ξ).
using AStarSampler = std::function<CMat(double t)>;

struct SymbolicFlowResult {
  double tau = 0;
  std::vector<double> t;
  std::vector<CMat> S;  // S(τ; t_k)
  int block_size = 0;
  double flow_residual = 0;        // ‖S(τ;t) − S(t′;t)S(τ;t′)‖/‖S(τ;t)‖ at the midpoint t′
  double liouville_residual = 0;   // | |det S| / exp(ε^{h−1} Im∫tr A⋆) − 1 |
  long steps = 0, rejected = 0;
};

// Solves ∂_t S + iε^{h−1}A⋆ S = 0, S(τ;τ) = I, by RK4 with step doubling.
// Samples at `samples` (sorted, inside [τ, t_end]) plus both endpoints.
SymbolicFlowResult integrate_symbolic_flow(const AStarSampler& a, const FlowConfig& cfg, double tau, double t_end,
                                           const std::vector<double>& samples = {});

// Hamiltonian trajectory of μ in the advected frame, cubic Hermite dense output.
using MuSampler = std::function<double(double t, const Vec& x, const Vec& xi)>;
struct Bicharacteristic {
  std::vector<double> t;
  std::vector<Vec> x, xi, dx, dxi;
  Vec x_at(double s) const;
  Vec xi_at(double s) const;
};
Bicharacteristic integrate_bicharacteristics(const MuSampler& mu, double eps, double h, double t0, double t1,
                                             const Vec& x0_frame, const Vec& x, const Vec& xi, int steps = 200);

struct BlockReduction {
  CMat Q;         // N×N, Q(A − μ)Q⁻¹ = diag(A₀, A₁)
  CMat A0, A1;    // 2×2 companion block and the remainder
  cplx star = 0;  // A₀(1,0)
  double separation = 0;
};
BlockReduction block_reduce_2x2(const CMat& A, cplx mu, double tol = 1e-10);
BlockReduction block_reduce_2x2(const Mat& A, double mu, double tol = 1e-10);

// A⋆(t) = (Q(A − μ)Q⁻¹)(ε^h t, x₀ + ε^{1−h}x⋆(ε^h t), ξ⋆(ε^h t)).
using QSampler = std::function<CMat(double t, const Vec& x, const Vec& xi)>;
AStarSampler assemble_A_star(const SymbolField& A, const QSampler& Q, const MuSampler& mu, double eps, double h,
                             const Vec& x0, const Bicharacteristic* traj, const Vec& x, const Vec& xi);

struct UpperBoundReport {
  double max_ratio = 0;
  double worst_t = 0;
  double limit = 0;  // C|log ε|^{C′}
  bool bounded = false;
};
UpperBoundReport verify_upper_bound(const SymbolicFlowResult& res, const GrowthEnvelope& env, double zeta, double eps,
                                    const Vec& x, const Vec& xi, double C = 10, double Cpow = 2);

struct LowerBoundReport {
  double min_ratio = 0;
  double floor = 0;  // |log ε|^{−C′}/C
  bool bounded_below = false;
};
// One flow per sample (S(0;T(ε))); ē in block coordinates.
LowerBoundReport verify_lower_bound(const std::vector<SymbolicFlowResult>& results, const std::vector<Vec>& xs,
                                    const GrowthEnvelope& env, const std::function<CVec(const Vec& x)>& ebar,
                                    double zeta, double eps, const Vec& xi0, double C = 10, double Cpow = 2);

// Largest Hermitian-part eigenvalue of the μ-scaled triangular form, restricted to the λ₀ cluster.
double hermitian_growth_bound(const std::vector<CMat>& samples, const CMat& center, cplx lambda0, double mu,
                              double cluster_tol = 1e-6);

}  // namespace hypflow
