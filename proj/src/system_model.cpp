#include "hypflow/system_model.hpp"

#include <cmath>

#include "hypflow/linalg.hpp"

namespace hypflow {

namespace {

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw DomainError(std::string(what) + " is not finite");
}

// Sixth-order centred difference of g along coordinate j.
template <class G>
Vec d_dx(const G& g, const Vec& x, int j, double h) {
  static const double w[3] = {45.0, -9.0, 1.0};
  Vec acc;
  for (int k = 1; k <= 3; ++k) {
    Vec xp = x, xm = x;
    xp(j) += k * h;
    xm(j) -= k * h;
    Vec diff = g(xp) - g(xm);
    if (acc.size() == 0) acc = Vec::Zero(diff.size());
    acc += w[k - 1] * diff;
  }
  return acc / (60.0 * h);
}

}  // namespace

Mat SystemSpec::A(int j, double t, const Vec& x, const Vec& u) const {
  Mat a = flux(j, t, x, u);
  if (a.rows() != N || a.cols() != N) throw DomainError("flux returned a matrix of wrong shape in " + name);
  return a;
}

Vec SystemSpec::F(double t, const Vec& x, const Vec& u) const {
  if (!source) return Vec::Zero(N);
  Vec f = source(t, x, u);
  if (f.size() != N) throw DomainError("source returned a vector of wrong size in " + name);
  return f;
}

Mat SystemSpec::dA(int j, int k, double t, const Vec& x, const Vec& u) const {
  if (flux_du) return flux_du(j, k, t, x, u);
  const double h = fd_rel_step * (1.0 + std::abs(u(k)));
  Vec up = u, um = u;
  up(k) += h;
  um(k) -= h;
  return (A(j, t, x, up) - A(j, t, x, um)) / (2 * h);
}

Mat SystemSpec::dF(double t, const Vec& x, const Vec& u) const {
  if (source_du) return source_du(t, x, u);
  Mat J(N, N);
  for (int k = 0; k < N; ++k) {
    const double h = fd_rel_step * (1.0 + std::abs(u(k)));
    Vec up = u, um = u;
    up(k) += h;
    um(k) -= h;
    J.col(k) = (F(t, x, up) - F(t, x, um)) / (2 * h);
  }
  return J;
}

Vec ReferenceSolution::dt_from_pde(const SystemSpec& sys, const Vec& x) const {
  if (!initial) throw DomainError("reference solution has no initial datum");
  Vec u = initial(x);
  check_finite(u, "phi(0,x)");
  Vec g = sys.F(0.0, x, u);
  for (int j = 0; j < sys.d; ++j) g -= sys.A(j, 0.0, x, u) * d_dx(initial, x, j, fd_step_x);
  return g;
}

Vec ReferenceSolution::dtt_from_pde(const SystemSpec& sys, const Vec& x) const {
  auto G = [&](const Vec& y) { return dt_from_pde(sys, y); };
  const Vec u = initial(x);
  const Vec g = G(x);
  std::vector<Vec> du(static_cast<size_t>(sys.d)), dg(static_cast<size_t>(sys.d));
  for (int j = 0; j < sys.d; ++j) {
    du[static_cast<size_t>(j)] = d_dx(initial, x, j, fd_step_x);
    dg[static_cast<size_t>(j)] = d_dx(G, x, j, fd_step_x);
  }
  // H(s) = right-hand side along (s, φ0 + sG, ∂φ0 + s∂G); φ_tt = H'(0).
  auto H = [&](double s) {
    Vec us = u + s * g;
    Vec r = sys.F(s, x, us);
    for (int j = 0; j < sys.d; ++j)
      r -= sys.A(j, s, x, us) * (du[static_cast<size_t>(j)] + s * dg[static_cast<size_t>(j)]);
    return r;
  };
  const double s = 1e-3;
  return (-H(2 * s) + 8 * H(s) - 8 * H(-s) + H(-2 * s)) / (12 * s);
}

namespace {

void check_domain(const Domain& dom, const Vec& x) {
  if (dom.lo.size() == x.size() && !dom.periodic) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x(i) < dom.lo(i) || x(i) > dom.hi(i)) throw DomainError("x outside the reference domain");
  }
}

}  // namespace

TimeSampler ReferenceSolution::sampler(const SystemSpec& sys, const Vec& x) const {
  if (!initial && !evolved) throw DomainError("reference solution undefined");
  check_domain(domain, x);
  if (evolved) {
    auto ev = evolved;
    return [ev, x](double t) { return ev(t, x); };
  }
  const Vec u0 = initial(x);
  check_finite(u0, "phi(0,x)");
  const Vec u1 = dt_from_pde(sys, x);
  const Vec u2 = dtt_from_pde(sys, x);
  return [u0, u1, u2](double t) { return Vec(u0 + t * u1 + 0.5 * t * t * u2); };
}

Vec ReferenceSolution::at(const SystemSpec& sys, double t, const Vec& x) const {
  if (t == 0 && initial && !evolved) {
    check_domain(domain, x);
    return initial(x);
  }
  return sampler(sys, x)(t);
}

Mat symbol_from_state(const SystemSpec& sys, double t, const Vec& x, const Vec& xi, const Vec& u) {
  if (xi.size() != sys.d) throw DomainError("xi has wrong dimension");
  Mat A = Mat::Zero(sys.N, sys.N);
  for (int j = 0; j < sys.d; ++j) A += xi(j) * sys.A(j, t, x, u);
  return A;
}

PrincipalSymbolEval eval_principal_symbol(const SystemSpec& sys, const ReferenceSolution& phi, double t,
                                          const Vec& x, const Vec& xi) {
  if (xi.size() != sys.d || xi.norm() == 0) throw DomainError("eval_principal_symbol: xi must be nonzero");
  Vec u = phi.at(sys, t, x);
  check_finite(u, "phi(t,x)");
  return {symbol_from_state(sys, t, x, xi, u), t, x, xi};
}

std::function<Mat(double t)> symbol_family(const SystemSpec& sys, const ReferenceSolution& phi, const Vec& x,
                                           const Vec& xi) {
  if (xi.size() != sys.d || xi.norm() == 0) throw DomainError("symbol_family: xi must be nonzero");
  TimeSampler s = phi.sampler(sys, x);
  return [sys, s, x, xi](double t) { return symbol_from_state(sys, t, x, xi, s(t)); };
}

cplx eval_charpoly(const Mat& A, cplx lambda) {
  const Eigen::Index n = A.rows();
  CMat M = lambda * CMat::Identity(n, n) - A.cast<cplx>();
  return M.partialPivLu().determinant();
}

cplx eval_charpoly(const PrincipalSymbolEval& A, cplx lambda) { return eval_charpoly(A.A, lambda); }

std::vector<double> charpoly_coeffs(const Mat& A) { return faddeev_leverrier(A); }

CharPolyJet charpoly_jet_family(const std::function<Mat(double t)>& family, cplx lambda, double t,
                                const JetSteps& steps) {
  const double h = steps.time_step;
  auto coeffs = [&](double s) { return charpoly_coeffs(family(s)); };
  const std::vector<double> c0 = coeffs(t);
  const size_t n = c0.size();
  auto first = [&](double hh) {
    std::vector<double> a = coeffs(t + hh), b = coeffs(t - hh), r(n);
    for (size_t k = 0; k < n; ++k) r[k] = (a[k] - b[k]) / (2 * hh);
    return r;
  };
  auto second = [&](double hh) {
    std::vector<double> a = coeffs(t + hh), b = coeffs(t - hh), r(n);
    for (size_t k = 0; k < n; ++k) r[k] = (a[k] - 2 * c0[k] + b[k]) / (hh * hh);
    return r;
  };
  std::vector<double> d1 = first(h), d2 = second(h);
  if (steps.richardson_levels >= 2) {
    std::vector<double> e1 = first(h / 2), e2 = second(h / 2);
    for (size_t k = 0; k < n; ++k) {
      d1[k] = (4 * e1[k] - d1[k]) / 3;
      d2[k] = (4 * e2[k] - d2[k]) / 3;
    }
  }
  CharPolyJet J;
  const PolyEval pe = horner(c0, lambda);
  J.P = pe.p;
  J.Pl = pe.dp;
  J.Pll = pe.ddp;
  const PolyEval pt = horner(d1, lambda);
  J.Pt = pt.p;
  J.Ptl = pt.dp;
  J.Ptt = horner(d2, lambda).p;
  J.t = t;
  J.time_step = h;
  J.noise_warning = h < 1e-6;
  J.omega.lambda = lambda;
  return J;
}

CharPolyJet charpoly_jet(const SystemSpec& sys, const ReferenceSolution& phi, const CotangentPoint& omega, double t,
                         const JetSteps& steps) {
  if (omega.xi.size() != sys.d || omega.xi.norm() == 0) throw DomainError("charpoly_jet: xi must be nonzero");
  CharPolyJet J = charpoly_jet_family(symbol_family(sys, phi, omega.x, omega.xi), omega.lambda, t, steps);
  J.omega = omega;
  return J;
}

std::vector<cplx> spectrum(const Mat& A) {
  std::vector<double> c = charpoly_coeffs(A);
  std::vector<cplx> cc(c.begin(), c.end());
  std::vector<cplx> r;
  try {
    r = aberth_roots(cc);
  } catch (const NumericalError&) {
    r = companion_roots(cc);
  }
  sort_lex(r);
  return r;
}

std::vector<cplx> spectrum(const PrincipalSymbolEval& A) { return spectrum(A.A); }

bool hyperbolicity_test(const Mat& A, double tol) {
  for (const cplx& z : spectrum(A))
    if (std::abs(z.imag()) > tol) return false;
  return true;
}

bool hyperbolicity_test(const PrincipalSymbolEval& A, double tol) { return hyperbolicity_test(A.A, tol); }

}  // namespace hypflow
