#include "hypflow/branching.hpp"

#include <array>
#include <cmath>

#include "hypflow/linalg.hpp"

namespace hypflow {

SymbolField make_symbol_field(const SystemSpec& sys, const ReferenceSolution& phi) {
  return [sys, phi](double t, const Vec& x, const Vec& xi) { return eval_principal_symbol(sys, phi, t, x, xi).A; };
}

namespace {

struct GaussLegendre16 {
  std::array<double, 16> x{}, w{};  // nodes and weights on [0, 1]
  GaussLegendre16() {
    const int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[static_cast<size_t>(i)] = 0.5 * (1 - z);
      w[static_cast<size_t>(i)] = 1.0 / ((1 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 g;
  return g;
}

CharPolyJet jet_at(const SymbolField& A, double t, const Vec& x, const Vec& xi, double lambda) {
  return charpoly_jet_family([&](double s) { return A(s, x, xi); }, lambda, t);
}

}  // namespace

double solve_mu_star(const SymbolField& A, double t, const Vec& x, const Vec& xi, double lambda_init, double tol,
                     NewtonDiagnostics* diag) {
  const std::vector<double> c = charpoly_coeffs(A(t, x, xi));
  double lam = lambda_init;
  for (int it = 1; it <= 50; ++it) {
    const PolyEval pe = horner(c, lam);
    const double dp = pe.dp.real(), ddp = pe.ddp.real();
    if (diag) *diag = {it, std::abs(dp)};
    if (std::abs(dp) <= tol) return lam;
    if (ddp == 0 || !std::isfinite(ddp)) break;
    const double step = dp / ddp;
    lam -= step;
    if (!std::isfinite(lam)) break;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(lam))) {
      const double r = std::abs(horner(c, lam).dp);
      if (diag) *diag = {it, r};
      return lam;
    }
  }
  throw NumericalError("solve_mu_star: Newton on dP/dlambda did not converge, residual " +
                       std::to_string(std::abs(horner(c, lam).dp)));
}

double solve_tau_star(const SymbolField& A, const Vec& x, const Vec& xi, double lambda_init, double tol,
                      NewtonDiagnostics* diag, bool* negative_root) {
  double t = 0, lam = lambda_init;
  for (int it = 1; it <= 50; ++it) {
    lam = solve_mu_star(A, t, x, xi, lam);
    const CharPolyJet j = jet_at(A, t, x, xi, lam);
    const double g = j.P.real(), dg = j.Pt.real();
    if (diag) *diag = {it, std::abs(g)};
    if (std::abs(g) <= tol) {
      if (negative_root) *negative_root = t < -tol;
      return t;
    }
    if (dg == 0 || !std::isfinite(dg)) break;
    const double step = g / dg;
    t -= step;
    if (!std::isfinite(t) || std::abs(t) > 1e6) break;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(t))) {
      if (negative_root) *negative_root = t < -tol;
      return t;
    }
  }
  throw NumericalError("solve_tau_star: Newton did not converge");
}

double eval_e_factor(const SymbolField& A, double t, const Vec& x, const Vec& xi, double lambda, double tau_star,
                     double lambda_init, double tol) {
  const GaussLegendre16& g = gl16();
  double e1 = 0, e2 = 0;
  const double mu_t = solve_mu_star(A, t, x, xi, lambda_init, tol);
  const std::vector<double> ct = charpoly_coeffs(A(t, x, xi));
  double lam = lambda_init;
  for (size_t k = 0; k < 16; ++k) {
    const double s = (1 - g.x[k]) * tau_star + g.x[k] * t;
    lam = solve_mu_star(A, s, x, xi, lam, tol);
    e1 += g.w[k] * jet_at(A, s, x, xi, lam).Pt.real();
    const double l2 = (1 - g.x[k]) * mu_t + g.x[k] * lambda;
    e2 += g.w[k] * (1 - g.x[k]) * horner(ct, l2).ddp.real();
  }
  if (std::abs(e2) < tol) throw NumericalError("eval_e_factor: degenerate quadratic part");
  return e1 / e2;
}

BranchData compute_branch(const SymbolField& A, const Vec& x, const Vec& xi, double lambda_init, double tol) {
  BranchData b;
  b.x = x;
  b.xi = xi;
  b.tau_star = solve_tau_star(A, x, xi, lambda_init, tol, &b.tau_diag, &b.negative_root);
  b.mu = solve_mu_star(A, b.tau_star, x, xi, lambda_init, tol, &b.mu_diag);
  const double mu0 = solve_mu_star(A, 0.0, x, xi, lambda_init, tol);
  b.e0 = eval_e_factor(A, 0.0, x, xi, mu0, b.tau_star, lambda_init, tol);
  b.f0 = b.e0;
  return b;
}

std::pair<cplx, cplx> branch_eigenvalues(const BranchData& b, double t) {
  if (t >= b.tau_star) {
    const double r = std::sqrt(std::max(0.0, (t - b.tau_star) * b.e0));
    return {cplx(b.mu, r), cplx(b.mu, -r)};
  }
  const double r = std::sqrt(std::max(0.0, (b.tau_star - t) * b.e0));
  return {cplx(b.mu + r, 0), cplx(b.mu - r, 0)};
}

GrowthEnvelope GrowthEnvelope::constant(double ell, double gamma, double tstar) {
  GrowthEnvelope e;
  e.ell = ell;
  e.gamma_minus = [gamma](const Vec&, const Vec&) { return gamma; };
  e.gamma_plus = e.gamma_minus;
  if (tstar != 0) e.t_star = [tstar](const Vec&, const Vec&) { return tstar; };
  return e;
}

double envelope_value(double gamma, double ell, double tstar, double tau, double t) {
  auto pos = [&](double s) { return s > 0 ? std::pow(s, ell + 1) : 0.0; };
  return std::exp(gamma * (pos(t - tstar) - pos(tau - tstar)));
}

double eval_growth(const GrowthEnvelope& env, GammaChoice which, double tau, double t, const Vec& x, const Vec& xi) {
  const double g = which == GammaChoice::Lower ? env.gamma_minus(x, xi) : env.gamma_plus(x, xi);
  return envelope_value(g, env.ell, env.tstar(x, xi), tau, t);
}

double estimate_c0(const SymbolField& A, const Vec& x0, const Vec& xi0, double delta, int samples_per_axis) {
  auto top = [&](const Vec& x, const Vec& xi) {
    double m = -1e300;
    for (const cplx& z : spectrum(A(0.0, x, xi))) m = std::max(m, z.imag());
    return m;
  };
  const double g0 = top(x0, xi0);
  double c0 = 0;
  const int n = std::max(2, samples_per_axis);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double a = -delta + 2 * delta * i / (n - 1);
      const double b = -delta + 2 * delta * k / (n - 1);
      Vec x = x0, xi = xi0;
      x(0) += a;
      xi(0) += b;
      const double off = std::abs(a) + std::abs(b);
      if (off == 0 || xi.norm() == 0) continue;
      c0 = std::max(c0, std::abs(top(x, xi) - g0) / off);
    }
  return c0;
}

std::pair<double, double> growth_rate(const Classification& c, const BranchData* branch, const Vec& x, const Vec& xi,
                                      double c0) {
  switch (c.regime) {
    case Regime::Elliptic: {
      const double off = (x - c.witness.x).norm() + (xi - c.witness.xi).norm();
      const double g = c.witness.lambda.imag();
      return {g - c0 * off, g + c0 * off};
    }
    case Regime::NonSemisimpleTransition: {
      if (!branch) throw DomainError("growth_rate: branch data required for the non-semisimple regime");
      if (branch->f0 <= 0) throw DomainError("growth_rate: f0 must be positive");
      const double g = (2.0 / 3.0) * std::sqrt(branch->f0);
      return {g, g};
    }
    case Regime::SemisimpleTransition: {
      const double disc = (c.jet.Ptt * c.jet.Pll).real() - std::norm(c.jet.Ptl);
      if (disc <= 0) throw DomainError("growth_rate: jet violates the semisimple inequality");
      const double g = 0.5 * std::sqrt(disc) / std::abs(c.jet.Pll);
      return {g, g};
    }
    default: throw DomainError("growth_rate: no rate for regime " + to_string(c.regime));
  }
}

}  // namespace hypflow
