#include "hypflow/symbolic_flow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "hypflow/linalg.hpp"

namespace hypflow {

double FlowConfig::T() const { return std::pow(T_star * std::abs(std::log(eps)), 1.0 / (1.0 + ell)); }

double FlowConfig::step_cap() const { return max_step > 0 ? max_step : 0.01 * std::pow(eps, 1.0 - h); }

void FlowConfig::validate() const {
  if (!(eps > 0 && eps < 1)) throw ConfigError("flow: eps must lie in (0,1)");
  if (!(h > 0 && h <= 1)) throw ConfigError("flow: h must lie in (0,1]");
  if (!(zeta >= 0 && zeta < h)) throw ConfigError("flow: zeta must satisfy 0 <= zeta < h");
  if (!(T_star > 0)) throw ConfigError("flow: T_star must be positive");
  if (!(rtol > 0 && atol >= 0)) throw ConfigError("flow: tolerances must be positive");
}

FlowConfig FlowConfig::for_ell(double eps, double ell) {
  FlowConfig c;
  c.eps = eps;
  c.ell = ell;
  c.h = 1.0 / (1.0 + ell);
  c.zeta = ell == 0.5 ? 1.0 / 3.0 : 0.0;
  return c;
}

namespace {

double maxabs(const CMat& M) { return M.cwiseAbs().maxCoeff(); }

struct Stepper {
  const AStarSampler& a;
  cplx k;  // −iε^{h−1}

  // One RK4 step for S and Simpson for ∫ Im tr A⋆, reusing the three generator samples.
  void step(double t, double dt, const CMat& A0, const CMat& Am, const CMat& A1, const CMat& S, CMat& out,
            double& trint) const {
    const CMat k1 = k * (A0 * S);
    const CMat k2 = k * (Am * (S + 0.5 * dt * k1));
    const CMat k3 = k * (Am * (S + 0.5 * dt * k2));
    const CMat k4 = k * (A1 * (S + dt * k3));
    out = S + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    trint = dt / 6.0 * (A0.trace().imag() + 4.0 * Am.trace().imag() + A1.trace().imag());
    (void)t;
  }
};

SymbolicFlowResult integrate_core(const AStarSampler& a, const FlowConfig& cfg, double tau, double t_end,
                                  std::vector<double> targets, double* trace_integral, double* log_det = nullptr) {
  SymbolicFlowResult res;
  res.tau = tau;
  CMat S0 = a(tau);
  const Eigen::Index n = S0.rows();
  res.block_size = static_cast<int>(n);
  CMat S = CMat::Identity(n, n);
  res.t.push_back(tau);
  res.S.push_back(S);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  const Stepper st{a, cplx(0, -1) * std::pow(cfg.eps, cfg.h - 1)};
  const double cap = cfg.step_cap();
  double t = tau;
  double dt = std::min(cap, std::max(1e-6, (t_end - tau) / 100));
  double trint = 0, logdet = 0;
  const CMat I = CMat::Identity(n, n);
  CMat At = S0;
  size_t next = 0;
  while (next < targets.size()) {
    const double target = targets[next];
    if (target <= t) {
      res.t.push_back(t);
      res.S.push_back(S);
      ++next;
      continue;
    }
    int halvings = 0;
    for (;;) {
      bool lands = false;
      double h = std::min(dt, cap);
      if (t + h >= target - 1e-6 * h) {  // stretch rather than leave a sliver before the target
        h = target - t;
        lands = true;
      }
      if (!(h > 1e-14 * (1 + std::abs(t)))) throw NumericalError("symbolic flow: step size underflow at t = " + std::to_string(t));
      const CMat Aq1 = a(t + 0.25 * h), Am = a(t + 0.5 * h), Aq3 = a(t + 0.75 * h), A1 = a(t + h);
      CMat full, half1, half2;
      double tr_full = 0, tr1 = 0, tr2 = 0;
      st.step(t, h, At, Am, A1, S, full, tr_full);
      st.step(t, 0.5 * h, At, Aq1, Am, S, half1, tr1);
      st.step(t + 0.5 * h, 0.5 * h, Am, Aq3, A1, half1, half2, tr2);
      const double err = maxabs(half2 - full) / 15.0;
      const double scale = cfg.rtol * maxabs(half2) + cfg.atol;
      if (err <= scale || !std::isfinite(err)) {
        if (!std::isfinite(err)) throw NumericalError("symbolic flow: non-finite state");
        S = half2 + (half2 - full) / 15.0;
        trint += tr1 + tr2;
        if (log_det) {
          // The step is linear in S, so S_new = R·S_old with R the same step applied to I.
          CMat rf, r1, r2;
          double dummy = 0;
          st.step(t, h, At, Am, A1, I, rf, dummy);
          st.step(t, 0.5 * h, At, Aq1, Am, I, r1, dummy);
          st.step(t + 0.5 * h, 0.5 * h, Am, Aq3, A1, r1, r2, dummy);
          logdet += std::log(std::abs((r2 + (r2 - rf) / 15.0).determinant()));
        }
        t = lands ? target : t + h;
        At = A1;
        ++res.steps;
        const double fac = err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 2.0;
        if (!lands) dt = h * std::clamp(fac, 0.2, 2.0);
        else dt = std::max(dt, h * std::clamp(fac, 0.2, 2.0));
        break;
      }
      ++res.rejected;
      if (++halvings > cfg.max_halvings)
        throw NumericalError("symbolic flow: tolerance not met, achieved local error " + std::to_string(err));
      dt = 0.5 * h;
    }
  }
  if (trace_integral) *trace_integral = trint;
  if (log_det) *log_det = logdet;
  return res;
}

}  // namespace

SymbolicFlowResult integrate_symbolic_flow(const AStarSampler& a, const FlowConfig& cfg, double tau, double t_end,
                                           const std::vector<double>& samples) {
  cfg.validate();
  if (t_end < tau) throw DomainError("integrate_symbolic_flow: t_end < tau");
  std::vector<double> targets;
  for (double s : samples)
    if (s > tau && s < t_end) targets.push_back(s);
  targets.push_back(t_end);
  const double mid = 0.5 * (tau + t_end);
  const bool check = cfg.check_flow && t_end > tau;
  if (check) targets.push_back(mid);
  double trint = 0, logdet = 0;
  SymbolicFlowResult res = t_end > tau ? integrate_core(a, cfg, tau, t_end, targets, &trint, &logdet)
                                       : integrate_core(a, cfg, tau, tau, {}, &trint, &logdet);
  if (t_end == tau) {
    res.t.push_back(tau);
    res.S.push_back(res.S.front());
  }
  const CMat& Sf = res.S.back();
  // log|det S| is accumulated per step; forming det S directly cancels catastrophically once S grows.
  res.liouville_residual = std::abs(std::expm1(logdet - std::pow(cfg.eps, cfg.h - 1) * trint));
  if (check) {
    size_t im = 0;
    for (size_t k = 0; k < res.t.size(); ++k)
      if (std::abs(res.t[k] - mid) < std::abs(res.t[im] - mid)) im = k;
    FlowConfig c2 = cfg;
    c2.check_flow = false;
    double tr2 = 0;
    SymbolicFlowResult second = integrate_core(a, c2, res.t[im], t_end, {t_end}, &tr2);
    const CMat composed = second.S.back() * res.S[im];
    res.flow_residual = norm2(Sf - composed) / std::max(norm2(Sf), 1e-300);
  }
  return res;
}

namespace {

Vec hermite(const std::vector<double>& ts, const std::vector<Vec>& y, const std::vector<Vec>& dy, double s) {
  if (ts.size() == 1) return y.front();
  size_t i = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), s) - ts.begin());
  i = std::clamp<size_t>(i, 1, ts.size() - 1);
  const double t0 = ts[i - 1], t1 = ts[i], hh = t1 - t0;
  const double u = (s - t0) / hh;
  const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
  return h00 * y[i - 1] + h10 * hh * dy[i - 1] + h01 * y[i] + h11 * hh * dy[i];
}

}  // namespace

Vec Bicharacteristic::x_at(double s) const { return hermite(t, x, dx, s); }
Vec Bicharacteristic::xi_at(double s) const { return hermite(t, xi, dxi, s); }

Bicharacteristic integrate_bicharacteristics(const MuSampler& mu, double eps, double h, double t0, double t1,
                                             const Vec& x0_frame, const Vec& x, const Vec& xi, int steps) {
  if (steps < 1) throw DomainError("integrate_bicharacteristics: steps must be positive");
  const double dt = (t1 - t0) / steps;
  if (t1 != t0 && !(std::abs(dt) > 1e-14 * (1 + std::abs(t0)))) throw NumericalError("bicharacteristics: step size underflow");
  const double sc = std::pow(eps, 1.0 - h);
  const Eigen::Index d = x.size();
  auto rhs = [&](double t, const Vec& y, const Vec& k) {
    const Vec X = x0_frame + sc * y;
    Vec dy(d), dk(d);
    const double fd = 1e-6;
    for (Eigen::Index j = 0; j < d; ++j) {
      Vec kp = k, km = k, Xp = X, Xm = X;
      kp(j) += fd;
      km(j) -= fd;
      Xp(j) += fd;
      Xm(j) -= fd;
      dy(j) = -(mu(t, X, kp) - mu(t, X, km)) / (2 * fd);
      dk(j) = sc * (mu(t, Xp, k) - mu(t, Xm, k)) / (2 * fd);
    }
    return std::pair<Vec, Vec>(dy, dk);
  };
  Bicharacteristic b;
  Vec y = x, k = xi;
  double t = t0;
  auto push = [&]() {
    auto [dy, dk] = rhs(t, y, k);
    b.t.push_back(t);
    b.x.push_back(y);
    b.xi.push_back(k);
    b.dx.push_back(dy);
    b.dxi.push_back(dk);
  };
  push();
  for (int i = 0; i < steps; ++i) {
    auto [a1, b1] = rhs(t, y, k);
    auto [a2, b2] = rhs(t + dt / 2, y + dt / 2 * a1, k + dt / 2 * b1);
    auto [a3, b3] = rhs(t + dt / 2, y + dt / 2 * a2, k + dt / 2 * b2);
    auto [a4, b4] = rhs(t + dt, y + dt * a3, k + dt * b3);
    y += dt / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    k += dt / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
    t = t0 + (i + 1) * dt;
    push();
  }
  return b;
}

namespace {

// Similarity taking a trace-free 2×2 block to [[0,1],[⋆,0]].
Eigen::Matrix2cd companion_similarity(const Eigen::Matrix2cd& B, double tol) {
  const cplx a11 = B(0, 0), a12 = B(0, 1), a21 = B(1, 0), a22 = B(1, 1);
  if (std::abs(a21) < tol && std::abs(a12) < tol)
    throw DomainError("block_reduce_2x2: off-diagonal entries vanish; the block spectrum would be smooth");
  Eigen::Matrix2cd T;
  if (std::abs(a12) > std::abs(a21)) {
    T << 1.0 / a12, 0, a11 / a12, 1;
  } else {
    T << 0, 1.0 / a21, 1, a22 / a21;
  }
  return T;
}

}  // namespace

BlockReduction block_reduce_2x2(const CMat& A, cplx mu, double tol) {
  const Eigen::Index n = A.rows();
  if (n < 2 || A.cols() != n) throw DomainError("block_reduce_2x2: need a square matrix of size >= 2");
  BlockReduction r;
  CMat P = CMat::Identity(n, n);  // P A P⁻¹ block diagonal
  CMat B;
  if (n == 2) {
    B = A;
    r.separation = std::numeric_limits<double>::infinity();
  } else {
    Eigen::ComplexSchur<CMat> cs(A);
    const CMat T0 = cs.matrixT();
    std::vector<std::pair<double, Eigen::Index>> dist;
    for (Eigen::Index i = 0; i < n; ++i) dist.push_back({std::abs(T0(i, i) - mu), i});
    std::sort(dist.begin(), dist.end());
    std::vector<bool> sel(static_cast<size_t>(n), false);
    sel[static_cast<size_t>(dist[0].second)] = true;
    sel[static_cast<size_t>(dist[1].second)] = true;
    OrderedSchur os = schur_reorder(cs.matrixU(), T0, sel);
    const CMat T11 = os.T.topLeftCorner(2, 2), T12 = os.T.topRightCorner(2, n - 2),
               T22 = os.T.bottomRightCorner(n - 2, n - 2);
    double sep = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < n - 2; ++j) sep = std::min(sep, std::abs(T11(i, i) - T22(j, j)));
    r.separation = sep;
    if (sep <= tol) throw DomainError("block_reduce_2x2: coalescing pair not separated from the rest of the spectrum");
    // T11 X − X T22 = −T12 removes the coupling block.
    const CMat X = solve_sylvester(T11, T22, -T12);
    CMat Yinv = CMat::Identity(n, n);
    Yinv.topRightCorner(2, n - 2) = -X;
    P = Yinv * os.U.adjoint();
    B = T11;
    r.A1 = T22 - mu * CMat::Identity(n - 2, n - 2);
  }
  const Eigen::Matrix2cd Bs = B - mu * Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd T = companion_similarity(Bs, tol);
  r.A0 = T * Bs * T.inverse();
  r.star = r.A0(1, 0);
  CMat Qf = CMat::Identity(n, n);
  Qf.topLeftCorner(2, 2) = T;
  r.Q = Qf * P;
  if (n == 2) r.A1 = CMat(0, 0);
  return r;
}

BlockReduction block_reduce_2x2(const Mat& A, double mu, double tol) {
  return block_reduce_2x2(CMat(A.cast<cplx>()), cplx(mu, 0), tol);
}

AStarSampler assemble_A_star(const SymbolField& A, const QSampler& Q, const MuSampler& mu, double eps, double h,
                             const Vec& x0, const Bicharacteristic* traj, const Vec& x, const Vec& xi) {
  const double th = std::pow(eps, h), sc = std::pow(eps, 1.0 - h);
  return [=](double s) {
    const double T = th * s;
    const Vec xs = traj ? traj->x_at(T) : x;
    const Vec ks = traj ? traj->xi_at(T) : xi;
    const Vec X = x0 + sc * xs;
    CMat M = A(T, X, ks).cast<cplx>();
    const Eigen::Index n = M.rows();
    if (mu) M -= mu(T, X, ks) * CMat::Identity(n, n);
    if (Q) {
      const CMat q = Q(T, X, ks);
      Eigen::PartialPivLU<CMat> lu(q);
      if (!(lu.rcond() > 1e-13)) throw DomainError("assemble_A_star: Q is singular at the sampled point");
      M = q * M * lu.inverse();
    }
    return M;
  };
}

UpperBoundReport verify_upper_bound(const SymbolicFlowResult& res, const GrowthEnvelope& env, double zeta, double eps,
                                    const Vec& x, const Vec& xi, double C, double Cpow) {
  UpperBoundReport r;
  r.limit = C * std::pow(std::abs(std::log(eps)), Cpow);
  const double ez = std::pow(eps, zeta);
  for (size_t k = 0; k < res.t.size(); ++k) {
    const double e = eval_growth(env, GammaChoice::Upper, res.tau, res.t[k], x, xi);
    const CMat& S = res.S[k];
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      for (Eigen::Index j = 0; j < S.cols(); ++j) {
        double w = 1;
        if (i == 0 && j == 1) w = 1.0 / ez;
        if (i == 1 && j == 0) w = ez;
        const double ratio = std::abs(S(i, j)) / (w * e);
        if (ratio > r.max_ratio) {
          r.max_ratio = ratio;
          r.worst_t = res.t[k];
        }
      }
  }
  r.bounded = r.max_ratio <= r.limit;
  return r;
}

LowerBoundReport verify_lower_bound(const std::vector<SymbolicFlowResult>& results, const std::vector<Vec>& xs,
                                    const GrowthEnvelope& env, const std::function<CVec(const Vec& x)>& ebar,
                                    double zeta, double eps, const Vec& xi0, double C, double Cpow) {
  LowerBoundReport r;
  r.floor = 1.0 / (C * std::pow(std::abs(std::log(eps)), Cpow));
  r.min_ratio = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < results.size(); ++k) {
    const SymbolicFlowResult& res = results[k];
    const double T = res.t.back();
    const double e = eval_growth(env, GammaChoice::Lower, res.tau, T, xs[k], xi0);
    const double v = (res.S.back() * ebar(xs[k])).norm() * std::pow(eps, zeta) / e;
    r.min_ratio = std::min(r.min_ratio, v);
  }
  r.bounded_below = r.min_ratio >= r.floor;
  return r;
}

double hermitian_growth_bound(const std::vector<CMat>& samples, const CMat& center, cplx lambda0, double mu,
                              double cluster_tol) {
  const OrderedSchur os =
      ordered_schur_by(center, [&](const cplx& z) { return std::abs(z - lambda0) <= cluster_tol * (1 + std::abs(lambda0)); });
  const int k = os.k;
  if (k == 0) throw DomainError("hermitian_growth_bound: lambda0 is not an eigenvalue of the center symbol");
  Vec scale(k);
  for (int i = 0; i < k; ++i) scale(i) = std::pow(mu, -i);
  double g = 0;
  for (const CMat& A : samples) {
    CMat M = (os.U.adjoint() * A * os.U).topLeftCorner(k, k);
    M -= lambda0 * CMat::Identity(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) M(i, j) *= scale(i) / scale(j);
    const CMat G = cplx(0, -1) * M;
    const CMat H = 0.5 * (G + G.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    g = std::max(g, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return g;
}

}  // namespace hypflow
