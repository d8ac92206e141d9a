#pragma once

#include <functional>
#include <utility>

#include "hypflow/classifier.hpp"

namespace hypflow {

// (t, x, ξ) ↦ A(t,x,ξ) along the reference solution, or an explicit symbol family.
using SymbolField = std::function<Mat(double t, const Vec& x, const Vec& xi)>;
SymbolField make_symbol_field(const SystemSpec& sys, const ReferenceSolution& phi);

struct NewtonDiagnostics {
  int iterations = 0;
  double residual = 0;
};

struct BranchData {
  Vec x, xi;
  double mu = 0;        // μ⋆(τ⋆(x,ξ), x, ξ)
  double tau_star = 0;  // τ⋆(x,ξ)
  double e0 = 0;        // e(0, x, ξ, μ)
  double f0 = 0;        // frozen value used by the Airy scaling
  bool negative_root = false;
  NewtonDiagnostics mu_diag, tau_diag;
};

double solve_mu_star(const SymbolField& A, double t, const Vec& x, const Vec& xi, double lambda_init,
                     double tol = 1e-12, NewtonDiagnostics* diag = nullptr);
// Returns τ⋆; `negative_root` reports a root below −tol.
double solve_tau_star(const SymbolField& A, const Vec& x, const Vec& xi, double lambda_init, double tol = 1e-12,
                      NewtonDiagnostics* diag = nullptr, bool* negative_root = nullptr);
// e = e₁/e₂ by 16-node Gauss–Legendre quadrature.
double eval_e_factor(const SymbolField& A, double t, const Vec& x, const Vec& xi, double lambda, double tau_star,
                     double lambda_init, double tol = 1e-12);

BranchData compute_branch(const SymbolField& A, const Vec& x, const Vec& xi, double lambda_init, double tol = 1e-12);

// λ± from the square-root branch; real on the hyperbolic side t < τ⋆.
std::pair<cplx, cplx> branch_eigenvalues(const BranchData& b, double t);

struct GrowthEnvelope {
  double ell = 0;
  std::function<double(const Vec& x, const Vec& xi)> gamma_minus, gamma_plus;
  std::function<double(const Vec& x, const Vec& xi)> t_star;  // empty means t⋆ ≡ 0

  double tstar(const Vec& x, const Vec& xi) const { return t_star ? t_star(x, xi) : 0.0; }
  static GrowthEnvelope constant(double ell, double gamma, double tstar = 0);
};

enum class GammaChoice { Lower, Upper };

double eval_growth(const GrowthEnvelope& env, GammaChoice which, double tau, double t, const Vec& x, const Vec& xi);
double envelope_value(double gamma, double ell, double tstar, double tau, double t);

// Lipschitz constant of the top imaginary part over a δ-box around (x₀, ξ₀).
double estimate_c0(const SymbolField& A, const Vec& x0, const Vec& xi0, double delta, int samples_per_axis = 5);

// (γ⁻, γ⁺) at (x, ξ); offsets are measured from the witness.
std::pair<double, double> growth_rate(const Classification& c, const BranchData* branch, const Vec& x, const Vec& xi,
                                      double c0 = 0);

}  // namespace hypflow
