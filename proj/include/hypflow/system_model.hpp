#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hypflow/types.hpp"

namespace hypflow {

// ∂_t u + Σ_j A_j(t,x,u) ∂_{x_j} u = F(t,x,u), u ∈ R^N, x ∈ R^d.
struct SystemSpec {
  std::string name;
  int d = 1;
  int N = 1;
  std::function<Mat(int j, double t, const Vec& x, const Vec& u)> flux;
  std::function<Vec(double t, const Vec& x, const Vec& u)> source;  // empty means F ≡ 0
  // Optional closed-form u-derivatives: ∂_{u_k} A_j and the Jacobian ∂_u F.
  std::function<Mat(int j, int k, double t, const Vec& x, const Vec& u)> flux_du;
  std::function<Mat(double t, const Vec& x, const Vec& u)> source_du;
  double fd_rel_step = 1e-5;  // fallback step is fd_rel_step·(1+|u|)
  bool symbol_only = false;   // no time evolution offered

  Mat A(int j, double t, const Vec& x, const Vec& u) const;
  Vec F(double t, const Vec& x, const Vec& u) const;
  Mat dA(int j, int k, double t, const Vec& x, const Vec& u) const;
  Mat dF(double t, const Vec& x, const Vec& u) const;
};

struct Domain {
  bool periodic = true;
  Vec lo, hi;  // box; empty means unbounded
};

// Samples of φ(t,x) at a fixed x as a function of t.
using TimeSampler = std::function<Vec(double t)>;

struct ReferenceSolution {
  std::function<Vec(const Vec& x)> initial;
  std::function<Vec(double t, const Vec& x)> evolved;  // optional
  Domain domain;
  double fd_step_x = 1e-2;

  bool has_evolved() const { return static_cast<bool>(evolved); }
  // φ(t,x): closed form if present, else the quadratic time-Taylor surrogate built from the PDE.
  Vec at(const SystemSpec& sys, double t, const Vec& x) const;
  TimeSampler sampler(const SystemSpec& sys, const Vec& x) const;
  // ∂_tφ(0,x) and ∂²_tφ(0,x) obtained from the PDE.
  Vec dt_from_pde(const SystemSpec& sys, const Vec& x) const;
  Vec dtt_from_pde(const SystemSpec& sys, const Vec& x) const;
};

struct CotangentPoint {
  Vec x;
  Vec xi;
  cplx lambda = 0;
};

struct PrincipalSymbolEval {
  Mat A;
  double t = 0;
  Vec x, xi;
};

enum class JetMethod { AnalyticCoefficients, FiniteDifference };

struct CharPolyJet {
  cplx P = 0, Pl = 0, Pll = 0, Pt = 0, Ptt = 0, Ptl = 0;
  CotangentPoint omega;
  double t = 0;
  JetMethod lambda_method = JetMethod::AnalyticCoefficients;
  JetMethod time_method = JetMethod::FiniteDifference;
  double time_step = 1e-4;
  bool noise_warning = false;
};

struct JetSteps {
  double time_step = 1e-4;
  int richardson_levels = 2;
};

// A(t,x,ξ) = Σ ξ_j A_j(t,x,u) for a given state u.
Mat symbol_from_state(const SystemSpec& sys, double t, const Vec& x, const Vec& xi, const Vec& u);

PrincipalSymbolEval eval_principal_symbol(const SystemSpec& sys, const ReferenceSolution& phi, double t,
                                          const Vec& x, const Vec& xi);
cplx eval_charpoly(const PrincipalSymbolEval& A, cplx lambda);
cplx eval_charpoly(const Mat& A, cplx lambda);

// Monic coefficients of det(λI − A(t,x,ξ)) in descending powers.
std::vector<double> charpoly_coeffs(const Mat& A);

CharPolyJet charpoly_jet(const SystemSpec& sys, const ReferenceSolution& phi, const CotangentPoint& omega,
                         double t = 0, const JetSteps& steps = {});
// Jet from an explicit time family of symbols (used for symbol-only families and block checks).
CharPolyJet charpoly_jet_family(const std::function<Mat(double t)>& family, cplx lambda, double t = 0,
                                const JetSteps& steps = {});

std::vector<cplx> spectrum(const Mat& A);
std::vector<cplx> spectrum(const PrincipalSymbolEval& A);
bool hyperbolicity_test(const PrincipalSymbolEval& A, double tol);
bool hyperbolicity_test(const Mat& A, double tol);

// Time family t ↦ A(t,x,ξ) along the reference solution.
std::function<Mat(double t)> symbol_family(const SystemSpec& sys, const ReferenceSolution& phi, const Vec& x,
                                           const Vec& xi);

}  // namespace hypflow
