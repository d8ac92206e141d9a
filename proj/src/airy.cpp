#include "hypflow/airy.hpp"

#include <cmath>

extern "C" {
#include <quadmath.h>
}

#include "hypflow/linalg.hpp"
#include "hypflow/symbolic_flow.hpp"

namespace hypflow {

std::string to_string(AiryMethod m) {
  switch (m) {
    case AiryMethod::Series: return "series";
    case AiryMethod::Asymptotic: return "asymptotic";
    case AiryMethod::ODEContinuation: return "ode-continuation";
  }
  return "?";
}

namespace {

using q = __float128;
using qc = __complex128;

qc make_qc(q re, q im) {
  qc z;
  __real__ z = re;
  __imag__ z = im;
  return z;
}

cplx to_cplx(qc z) { return {static_cast<double>(crealq(z)), static_cast<double>(cimagq(z))}; }

// Maclaurin series summed in quad precision.
AiryValue airy_series(cplx zd) {
  const q c1 = q(1.0) / (powq(q(3.0), q(2.0) / q(3.0)) * tgammaq(q(2.0) / q(3.0)));
  const q c2 = q(1.0) / (powq(q(3.0), q(1.0) / q(3.0)) * tgammaq(q(1.0) / q(3.0)));
  const qc z = make_qc(zd.real(), zd.imag());
  const qc z3 = z * z * z;
  // f = Σ a_k z^{3k}, g = Σ b_k z^{3k+1}; derivatives summed alongside.
  qc f = make_qc(1, 0), g = z, fp = make_qc(0, 0), gp = make_qc(1, 0);
  qc tf = make_qc(1, 0);  // a_k z^{3k}
  qc tg = z;              // b_k z^{3k+1}
  for (int k = 1; k < 400; ++k) {
    const q kk = k;
    tf = tf * z3 / ((3 * kk - 1) * (3 * kk));
    tg = tg * z3 / ((3 * kk) * (3 * kk + 1));
    f += tf;
    g += tg;
    // d/dz z^{3k} = 3k z^{3k-1}; tf*3k/z, avoiding division by zero at z = 0.
    if (cabsq(z) > 0) {
      fp += tf * (3 * kk) / z;
      gp += tg * (3 * kk + 1) / z;
    }
    if (k >= 80 && cabsq(tf) < q(1e-40) * cabsq(f) && cabsq(tg) < q(1e-40) * (cabsq(g) + q(1e-300))) break;
  }
  AiryValue v;
  v.z = zd;
  v.ai = to_cplx(c1 * f - c2 * g);
  v.aip = to_cplx(c1 * fp - c2 * gp);
  v.method = AiryMethod::Series;
  return v;
}

// Large-|z| expansion, valid for |arg z| ≤ 2π/3.
AiryValue airy_asymptotic(cplx z) {
  const cplx z14 = std::pow(z, 0.25);
  const cplx zeta = (2.0 / 3.0) * std::pow(z, 1.5);
  const cplx pre = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
  cplx su = 1.0, sv = 1.0;
  double u = 1.0;
  cplx zk = 1.0;
  double last = 1e300;
  for (int k = 1; k < 80; ++k) {
    u *= (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k);
    const double v = -(6.0 * k + 1) / (6.0 * k - 1) * u;
    zk *= -1.0 / zeta;
    const cplx tu = u * zk, tv = v * zk;
    const double mag = std::abs(tu);
    if (k >= 8 && (mag > last || mag < 1e-18 * std::abs(su))) break;
    su += tu;
    sv += tv;
    last = mag;
  }
  AiryValue r;
  r.z = z;
  r.ai = pre / z14 * su;
  r.aip = -pre * z14 * sv;
  r.method = AiryMethod::Asymptotic;
  return r;
}

}  // namespace

AiryValue airy_ai(cplx z) {
  const double r = std::abs(z);
  if (!(r <= kAiryMaxRadius)) throw DomainError("airy_ai: |z| exceeds documented range 40");
  if (r <= kAirySeriesRadius) return airy_series(z);
  if (std::abs(std::arg(z)) <= 2.0 * kPi / 3.0 + 1e-12) return airy_asymptotic(z);
  // Connection formula Ai(z) + jAi(jz) + j²Ai(j²z) = 0.
  const cplx j2 = kJ * kJ;
  AiryValue a = airy_asymptotic(kJ * z);
  AiryValue b = airy_asymptotic(j2 * z);
  AiryValue v;
  v.z = z;
  v.ai = -kJ * a.ai - j2 * b.ai;
  v.aip = -j2 * a.aip - kJ * b.aip;
  v.method = AiryMethod::Asymptotic;
  return v;
}

cplx wronskian(double tau) {
  AiryValue a = airy_ai(tau);
  AiryValue b = airy_ai(kJ * tau);
  return b.ai * a.aip - kJ * b.aip * a.ai;
}

Eigen::Matrix2cd vector_airy(double tau, double t) {
  AiryValue at = airy_ai(tau), ajt = airy_ai(kJ * tau);
  AiryValue as = airy_ai(t), ajs = airy_ai(kJ * t);
  const cplx W = ajt.ai * at.aip - kJ * ajt.aip * at.ai;
  Eigen::Matrix2cd Z;
  Z(0, 0) = -kJ * ajt.aip * as.ai + at.aip * ajs.ai;
  Z(0, 1) = -ajt.ai * as.ai + at.ai * ajs.ai;
  Z(1, 0) = kJ * ajt.aip * as.aip - kJ * at.aip * ajs.aip;
  Z(1, 1) = ajt.ai * as.aip - kJ * at.ai * ajs.aip;
  return Z / W;
}

Eigen::Matrix2cd vector_airy_ode(double tau, double t, int steps) {
  Eigen::Matrix2cd Z = Eigen::Matrix2cd::Identity();
  auto rhs = [](double s, const Eigen::Matrix2cd& Y) {
    Eigen::Matrix2cd M;
    M << 0, 1, s, 0;
    return Eigen::Matrix2cd(-M * Y);
  };
  const double h = (t - tau) / steps;
  double s = tau;
  for (int i = 0; i < steps; ++i) {
    Eigen::Matrix2cd k1 = rhs(s, Z);
    Eigen::Matrix2cd k2 = rhs(s + h / 2, Z + h / 2 * k1);
    Eigen::Matrix2cd k3 = rhs(s + h / 2, Z + h / 2 * k2);
    Eigen::Matrix2cd k4 = rhs(s + h, Z + h * k3);
    Z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s = tau + (i + 1) * h;
  }
  return Z;
}

double airy_envelope(double tau, double t) {
  auto p = [](double s) { return s > 0 ? std::pow(s, 1.5) : 0.0; };
  return std::exp((2.0 / 3.0) * (p(t) - p(tau)));
}

AiryBoundsReport verify_airy_bounds(const std::vector<double>& t_grid) {
  AiryBoundsReport r;
  r.c_lower = 1e300;
  for (size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    if (t < 0) continue;
    for (size_t k = 0; k <= i; ++k) {
      const double tau = t_grid[k];
      if (tau < 0 || tau > t) continue;
      const Eigen::Matrix2cd Z = vector_airy(tau, t);
      const double bound = std::pow(1 + std::abs(tau), 0.25) * std::pow(1 + std::abs(t), 0.25) * airy_envelope(tau, t);
      r.C_upper = std::max(r.C_upper, norm2(Z) / bound);
    }
    const Eigen::Matrix2cd Z0 = vector_airy(0.0, t);
    r.c_lower = std::min(r.c_lower, Z0.col(1).norm() / airy_envelope(0.0, t));
    if (t > 0) r.C_oscillatory = std::max(r.C_oscillatory, std::abs(airy_ai(-t).ai) * std::pow(t, 0.25));
  }
  r.upper_ok = r.C_upper <= 2.0;
  r.lower_ok = r.c_lower >= 0.05;
  return r;
}

Eigen::Matrix2cd airy_block_closed_form(double eps, double f0, double tstar, double tau, double t) {
  const double f13 = std::cbrt(f0);
  const cplx d1 = cplx(0, -1) * std::cbrt(eps) * f13;
  Eigen::Matrix2cd D = Eigen::Matrix2cd::Zero(), Dinv = Eigen::Matrix2cd::Zero();
  D(0, 0) = d1;
  D(1, 1) = 1;
  Dinv(0, 0) = 1.0 / d1;
  Dinv(1, 1) = 1;
  return Dinv * vector_airy(f13 * (tau - tstar), f13 * (t - tstar)) * D;
}

double conjugated_flow_compare(double eps, double f0, double tstar, double tau, double t) {
  FlowConfig cfg = FlowConfig::for_ell(eps, 0.5);
  cfg.rtol = 1e-12;
  AStarSampler a = [eps, f0, tstar](double s) {
    CMat M(2, 2);
    M << 0, 1, -std::pow(eps, 2.0 / 3.0) * (s - tstar) * f0, 0;
    return M;
  };
  SymbolicFlowResult res = integrate_symbolic_flow(a, cfg, tau, t);
  const CMat& S = res.S.back();
  const Eigen::Matrix2cd C = airy_block_closed_form(eps, f0, tstar, tau, t);
  double worst = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double diff = std::abs(S(i, j) - C(i, j));
      const double ref = std::abs(C(i, j));
      if (ref == 0) {
        worst = std::max(worst, diff);
        continue;
      }
      worst = std::max(worst, diff / ref);
    }
  return worst;
}

}  // namespace hypflow
