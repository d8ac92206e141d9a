#include "hypflow/pde_sim.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

#include "hypflow/linalg.hpp"
#include "hypflow/parallel.hpp"
#include "hypflow/symbolic_flow.hpp"

namespace hypflow {

namespace {

int folded(int k, int n) { return k > n / 2 ? k - n : k; }

double wrap(double d, double L) {
  d = std::fmod(d + 0.5 * L, L);
  if (d < 0) d += L;
  return d - 0.5 * L;
}

int band_limit(const SolverConfig& cfg, int n) { return cfg.dealias ? n / 3 : n / 2; }

void truncate_modes(CMat& m, int n, int keep) {
  for (int k = 0; k < n; ++k)
    if (std::abs(folded(k, n)) > keep) m.col(k).setZero();
}

void apply_filter(CMat& m, const SolverConfig& cfg, int n) {
  if (!cfg.filter) return;
  const double kc = band_limit(cfg, n);
  for (int k = 0; k < n; ++k) {
    const double r = std::abs(folded(k, n)) / kc;
    if (r > 0) m.col(k) *= std::exp(-cfg.filter_strength * std::pow(r, cfg.filter_order));
  }
}

CMat modes_of(const CMat& v) {
  CMat m(v.rows(), v.cols());
  for (Eigen::Index r = 0; r < v.rows(); ++r) m.row(r) = fft(v.row(r).transpose()).transpose();
  return m;
}

CMat values_of(const CMat& m) {
  CMat v(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) v.row(r) = ifft(m.row(r).transpose()).transpose();
  return v;
}

CMat deriv_modes(const CMat& m, double L) {
  const int n = static_cast<int>(m.cols());
  CMat d(m.rows(), n);
  for (int k = 0; k < n; ++k) {
    const cplx f = (2 * k == n) ? cplx(0) : cplx(0, 2 * kPi / L * folded(k, n));
    d.col(k) = f * m.col(k);
  }
  return d;
}

double spectral_radius(const Mat& A) {
  double r = 0;
  for (const cplx& z : spectrum(A)) r = std::max(r, std::abs(z));
  return r;
}

GridFunction to_grid(const CMat& v, const GridFunction& like) {
  GridFunction g(static_cast<int>(v.rows()), like.n, like.L, like.origin);
  g.values = v;
  return g;
}

}  // namespace

void SolverConfig::check_cfl(double max_speed) const {
  const double c = dt * max_speed * n / L;
  if (c > 0.5)
    throw ConfigError("CFL bound dt*max|lambda(A)|*n/L <= 0.5 violated (value " + std::to_string(c) + ")");
}

double SolverConfig::auto_dt(double max_speed) const {
  double d = t_end / 50;
  if (max_speed > 0) d = std::min(d, cfl * L / (n * max_speed));
  const long steps = static_cast<long>(std::ceil(t_end / d - 1e-12));
  return t_end / std::max(1L, steps);
}

double max_char_speed(const SystemSpec& sys, double t, const GridFunction& u) {
  double s = 0;
  for (int j = 0; j < u.n; ++j) {
    const Vec uj = u.values.col(j).real();
    s = std::max(s, spectral_radius(sys.A(0, t, vec1(u.x(j)), uj)));
  }
  return s;
}

BreakdownFlag breakdown_detector(const GridFunction& state, const SolverConfig& cfg) {
  if (!state.values.allFinite()) return {true, "non-finite value"};
  if (state.max_abs() > cfg.linf_cap) return {true, "L-infinity cap exceeded"};
  const CMat m = state.modes();
  const int n = state.n, kb = band_limit(cfg, n);
  double total = 0, tail = 0;
  for (int k = 0; k < n; ++k) {
    const int kk = std::abs(folded(k, n));
    if (kk == 0 || kk > kb) continue;
    const double e = m.col(k).squaredNorm();
    total += e;
    if (3 * kk > 2 * kb) tail += e;
  }
  if (total > 0 && tail > cfg.tail_cap * total) return {true, "spectral tail fraction exceeded"};
  return {};
}

Trajectory evolve(const SystemSpec& sys, const GridFunction& u0, const SolverConfig& cfg) {
  if (sys.symbol_only) throw DomainError("evolve: system " + sys.name + " is symbol-only");
  if (sys.d != 1) throw DomainError("evolve: only one space dimension is supported");
  if (u0.comps() != sys.N) throw DomainError("evolve: datum has wrong number of components");
  const int n = u0.n, N = sys.N;
  SolverConfig c = cfg;
  c.n = n;
  c.L = u0.L;
  const double speed0 = max_char_speed(sys, 0.0, u0);
  if (c.dt <= 0) c.dt = c.auto_dt(speed0);
  c.check_cfl(speed0);
  const long steps = std::max(1L, static_cast<long>(std::llround(c.t_end / c.dt)));
  const double dt = c.t_end / steps;
  const int keep = band_limit(c, n);

  std::vector<Vec> xs(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) xs[static_cast<size_t>(j)] = vec1(u0.x(j));

  auto rhs = [&](double t, const CMat& m) {
    CMat mm = m;
    if (c.dealias) truncate_modes(mm, n, keep);
    const Mat u = values_of(mm).real();
    const Mat ux = values_of(deriv_modes(mm, u0.L)).real();
    CMat r(N, n);
    for (int j = 0; j < n; ++j) {
      const Vec uj = u.col(j);
      const Vec& x = xs[static_cast<size_t>(j)];
      Vec g = sys.F(t, x, uj) - sys.A(0, t, x, uj) * ux.col(j);
      r.col(j) = g.cast<cplx>();
    }
    CMat rm = modes_of(r);
    if (c.dealias) truncate_modes(rm, n, keep);
    return rm;
  };

  Trajectory tr;
  tr.dt = dt;
  CMat m = modes_of(CMat(u0.values.real().cast<cplx>()));
  if (c.dealias) truncate_modes(m, n, keep);
  tr.t.push_back(0);
  tr.u.push_back(to_grid(values_of(m), u0));
  double t = 0;
  for (long s = 1; s <= steps; ++s) {
    const CMat k1 = rhs(t, m);
    const CMat k2 = rhs(t + 0.5 * dt, m + 0.5 * dt * k1);
    const CMat k3 = rhs(t + 0.5 * dt, m + 0.5 * dt * k2);
    const CMat k4 = rhs(t + dt, m + dt * k3);
    CMat next = m + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    apply_filter(next, c, n);
    const double tn = (s == steps) ? c.t_end : s * dt;
    GridFunction g = to_grid(CMat(values_of(next).real().cast<cplx>()), u0);
    BreakdownFlag f = breakdown_detector(g, c);
    if (!f.tripped && s % 10 == 0) {
      const double sp = max_char_speed(sys, tn, g);
      if (dt * sp * n / u0.L > 0.5) f = {true, "CFL bound exceeded"};
    }
    if (f.tripped) {
      tr.breakdown = true;
      tr.breakdown_time = tn;
      tr.reason = f.reason;
      break;
    }
    m = std::move(next);
    t = tn;
    tr.last_valid_time = t;
    tr.steps = s;
    if (s % std::max(1, c.sample_every) == 0 || s == steps) {
      tr.t.push_back(t);
      tr.u.push_back(std::move(g));
    }
  }
  return tr;
}

Trajectory evolve_linearized(const SystemSpec& sys, const ReferenceSolution& phi, const GridFunction& v0,
                             const LinearizedFrame& fr, const SolverConfig& cfg) {
  if (sys.d != 1) throw DomainError("evolve_linearized: only one space dimension is supported");
  if (v0.comps() != sys.N) throw DomainError("evolve_linearized: datum has wrong number of components");
  const int n = v0.n, N = sys.N;
  const double slow = std::pow(fr.eps, 1 - fr.h);
  const double fastc = std::pow(fr.eps, fr.h - 1);

  std::vector<Vec> X(static_cast<size_t>(n));
  std::vector<TimeSampler> ph(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    X[static_cast<size_t>(j)] = vec1(fr.x0(0) + slow * v0.x(j));
    ph[static_cast<size_t>(j)] = phi.sampler(sys, X[static_cast<size_t>(j)]);
  }
  const double fd = 1e-6;
  auto coeffs = [&](double t, std::vector<Mat>& A, std::vector<Mat>& B) {
    A.resize(static_cast<size_t>(n));
    B.resize(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      const size_t jj = static_cast<size_t>(j);
      const Vec p = ph[jj](t);
      A[jj] = fastc * sys.A(0, t, X[jj], p);
      Mat b = Mat::Zero(N, N);
      if (fr.include_B) {
        const Vec dphi = (phi.at(sys, t, X[jj] + vec1(fd)) - phi.at(sys, t, X[jj] - vec1(fd))) / (2 * fd);
        for (int k = 0; k < N; ++k) b.col(k) += sys.dA(0, k, t, X[jj], p) * dphi;
        if (sys.source) b -= sys.dF(t, X[jj], p);
      }
      B[jj] = b;
    }
  };

  std::vector<Mat> A0, B0;
  coeffs(0.0, A0, B0);
  Mat Ac = Mat::Zero(N, N);
  for (const Mat& a : A0) Ac += a;
  Ac /= n;

  bool frozen = true;
  {
    std::vector<Mat> A1, B1;
    for (double ts : {0.5 * cfg.t_end, cfg.t_end}) {
      coeffs(ts, A1, B1);
      for (int j = 0; j < n && frozen; ++j)
        if ((A1[static_cast<size_t>(j)] - A0[static_cast<size_t>(j)]).cwiseAbs().maxCoeff() > 1e-14 * (1 + Ac.norm()) ||
            (B1[static_cast<size_t>(j)] - B0[static_cast<size_t>(j)]).cwiseAbs().maxCoeff() > 1e-14)
          frozen = false;
    }
  }
  bool remainder_zero = frozen;
  double rem_speed = 0;
  for (int j = 0; j < n; ++j) {
    const Mat d = A0[static_cast<size_t>(j)] - Ac;
    if (d.cwiseAbs().maxCoeff() > 1e-14 * (1 + Ac.norm()) || B0[static_cast<size_t>(j)].cwiseAbs().maxCoeff() > 0)
      remainder_zero = false;
    rem_speed = std::max(rem_speed, spectral_radius(d));
  }
  if (!frozen) {
    std::vector<Mat> A1, B1;
    coeffs(cfg.t_end, A1, B1);
    for (const Mat& a : A1) rem_speed = std::max(rem_speed, spectral_radius(a - Ac));
  }

  SolverConfig c = cfg;
  c.n = n;
  c.L = v0.L;
  if (c.dt <= 0) c.dt = c.auto_dt(rem_speed);
  c.check_cfl(rem_speed);
  const long steps = std::max(1L, static_cast<long>(std::llround(c.t_end / c.dt)));
  const double dt = c.t_end / steps;
  const int keep = band_limit(c, n);

  std::vector<CMat> E(static_cast<size_t>(n)), Eh(static_cast<size_t>(n));
  const CMat Acc = Ac.cast<cplx>();
  for (int k = 0; k < n; ++k) {
    const double xi = (2 * k == n) ? 0.0 : 2 * kPi / v0.L * folded(k, n);
    const CMat G = cplx(0, -xi) * Acc;
    E[static_cast<size_t>(k)] = CMat(G * dt).exp();
    Eh[static_cast<size_t>(k)] = CMat(G * (0.5 * dt)).exp();
  }
  auto apply = [&](const std::vector<CMat>& P, const CMat& m) {
    CMat r(m.rows(), m.cols());
    for (int k = 0; k < n; ++k) r.col(k) = P[static_cast<size_t>(k)] * m.col(k);
    return r;
  };

  std::vector<Mat> At, Bt;
  double cached_t = 0;
  At = A0;
  Bt = B0;
  auto remainder = [&](double t, const CMat& m) -> CMat {
    if (remainder_zero) return CMat::Zero(N, n);
    if (!frozen && t != cached_t) {
      coeffs(t, At, Bt);
      cached_t = t;
    }
    CMat mm = m;
    if (c.dealias) truncate_modes(mm, n, keep);
    const CMat v = values_of(mm), vx = values_of(deriv_modes(mm, v0.L));
    CMat r(N, n);
    for (int j = 0; j < n; ++j) {
      const size_t jj = static_cast<size_t>(j);
      r.col(j) = -((At[jj] - Ac).cast<cplx>() * vx.col(j)) - Bt[jj].cast<cplx>() * v.col(j);
    }
    CMat rm = modes_of(r);
    if (c.dealias) truncate_modes(rm, n, keep);
    return rm;
  };

  Trajectory tr;
  tr.dt = dt;
  CMat m = v0.modes();
  if (c.dealias) truncate_modes(m, n, keep);
  tr.t.push_back(0);
  tr.u.push_back(to_grid(values_of(m), v0));
  double t = 0;
  for (long s = 1; s <= steps; ++s) {
    CMat next;
    if (remainder_zero) {
      next = apply(E, m);
    } else {
      const CMat a = remainder(t, m);
      const CMat b = remainder(t + 0.5 * dt, apply(Eh, m + 0.5 * dt * a));
      const CMat cc = remainder(t + 0.5 * dt, apply(Eh, m) + 0.5 * dt * b);
      const CMat d = remainder(t + dt, apply(E, m) + dt * apply(Eh, cc));
      next = apply(E, m) + dt / 6 * (apply(E, a) + 2 * apply(Eh, CMat(b + cc)) + d);
    }
    apply_filter(next, c, n);
    const double tn = (s == steps) ? c.t_end : s * dt;
    GridFunction g = to_grid(values_of(next), v0);
    const BreakdownFlag f = g.values.allFinite() && g.max_abs() <= c.linf_cap ? BreakdownFlag{}
                                                                              : BreakdownFlag{true, "non-finite or capped"};
    if (f.tripped) {
      tr.breakdown = true;
      tr.breakdown_time = tn;
      tr.reason = f.reason;
      break;
    }
    m = std::move(next);
    t = tn;
    tr.last_valid_time = t;
    tr.steps = s;
    if (s % std::max(1, c.sample_every) == 0 || s == steps) {
      tr.t.push_back(t);
      tr.u.push_back(std::move(g));
    }
  }
  return tr;
}

double HadamardParams::K_prime() const { return alpha * (K - m) - (1 - alpha) * (1 - h) * d / 2; }

void HadamardParams::validate() const {
  if (!(alpha > 0.5 && alpha <= 1)) throw ConfigError("HadamardParams: alpha must lie in (1/2, 1]");
  if (!(h > 0 && h <= 1)) throw ConfigError("HadamardParams: h must lie in (0, 1]");
  if (!(delta > 0.5)) throw ConfigError("HadamardParams: delta must exceed 1/2");
  const double lhs = (2 * alpha - 1) * K, rhs = 2 * alpha * m + (1 - alpha) * (1 - h) * d;
  if (!(lhs > rhs))
    throw ConfigError("HadamardParams: (2*alpha-1)*K > 2*alpha*m + (1-alpha)*(1-h)*d violated (" +
                      std::to_string(lhs) + " <= " + std::to_string(rhs) + ")");
  if (!(2 * K_prime() > K))
    throw ConfigError("HadamardParams: 2K' > K violated (K' = " + std::to_string(K_prime()) + ")");
  if (!(gamma_minus * T_star > K))
    throw ConfigError("HadamardParams: gamma_minus*T_star > K violated (" + std::to_string(gamma_minus * T_star) +
                      " <= " + std::to_string(K) + ")");
}

double HadamardParams::T(double eps) const { return std::pow(T_star * std::abs(std::log(eps)), 1 / (1 + ell)); }

HadamardParams HadamardParams::defaults(double h, double ell, double gamma_minus, int d) {
  HadamardParams p;
  p.h = h;
  p.ell = ell;
  p.d = d;
  p.gamma_minus = gamma_minus;
  const double rhs = (2 * p.alpha * p.m + (1 - p.alpha) * (1 - h) * d) / (2 * p.alpha - 1);
  p.K = std::floor(rhs + 1e-12) + 1;
  if (gamma_minus <= 0) throw ConfigError("HadamardParams: gamma_minus must be positive");
  p.T_star = 1.5 * p.K / gamma_minus;
  return p;
}

HadamardRow hadamard_ratio(const Trajectory& u, const Trajectory& phi, const HadamardParams& p, double eps,
                           double x0) {
  HadamardRow row;
  row.eps = eps;
  row.T = p.T(eps);
  row.breakdown = u.breakdown;
  row.breakdown_time = u.breakdown_time;
  row.breakdown_reason = u.reason;
  const size_t cnt = std::min(u.u.size(), phi.u.size());
  if (cnt == 0) return row;
  const GridFunction& g0 = u.u[0];
  row.n = g0.n;
  row.L = g0.L;
  row.dt = u.dt;
  const double radius = std::pow(eps, 1 - p.h) * p.delta;
  std::vector<int> ball;
  for (int j = 0; j < g0.n; ++j)
    if (std::abs(wrap(g0.x(j) - x0, g0.L)) <= radius) ball.push_back(j);
  if (ball.empty()) throw DomainError("hadamard_ratio: no grid node inside the observation ball");

  auto diff = [&](size_t i) {
    GridFunction d = u.u[i];
    d.values = (u.u[i].values - phi.u[i].values).real().cast<cplx>();
    return d;
  };
  double amp0 = 0, amp_last = 0, t_last = 0;
  for (size_t i = 0; i < cnt; ++i) {
    const GridFunction d = diff(i);
    const GridFunction dd = d.derivative();
    double a = 0, b = 0;
    for (int j : ball) {
      a = std::max(a, d.values.col(j).cwiseAbs().maxCoeff());
      b = std::max(b, dd.values.col(j).cwiseAbs().maxCoeff());
    }
    row.numerator = std::max(row.numerator, a + b);
    if (i == 0) amp0 = a;
    amp_last = a;
    t_last = u.t[i];
  }
  row.denominator = std::pow(eps_sobolev_norm(diff(0), p.m, 1.0, 1.0), p.alpha);
  row.ratio = row.denominator > 0 ? row.numerator / row.denominator : 0.0;
  const double s = t_last / std::pow(eps, p.h);
  if (amp0 > 0 && s > 0) row.growth_exponent = std::log(amp_last / amp0) / std::pow(s, p.ell + 1);
  row.predicted_exponent = p.gamma_minus * std::abs(p.xi0);
  return row;
}

namespace {

bool homogeneous(const SystemSpec& sys, const ReferenceSolution& phi, double x0) {
  const Vec ref = phi.at(sys, 0.0, vec1(x0));
  for (int k = 1; k <= 8; ++k) {
    const Vec v = phi.at(sys, 0.0, vec1(x0 - kPi + 2 * kPi * k / 9));
    if ((v - ref).cwiseAbs().maxCoeff() > 1e-14 * (1 + ref.norm())) return false;
  }
  return true;
}

}  // namespace

HadamardReport run_instability_experiment(const SystemSpec& sys, const ReferenceSolution& phi,
                                          const Classification& cls, const HadamardParams& p,
                                          const std::vector<double>& ladder, const SolverConfig& cfg,
                                          const ExperimentSetup& setup) {
  p.validate();
  if (cls.regime != Regime::HyperbolicPersistent && cls.regime != Regime::Indeterminate &&
      std::abs(cls.h - p.h) > 1e-12)
    throw ConfigError("run_instability_experiment: h of the parameters differs from the classification");
  if (ladder.empty()) throw ConfigError("run_instability_experiment: empty epsilon ladder");
  const int N = sys.N;
  CVec e = setup.ebar.size() ? setup.ebar : CVec(CVec::Unit(N, 0));
  if (e.size() != N) throw ConfigError("run_instability_experiment: packet direction has wrong size");
  e /= e.norm();
  const bool homog = homogeneous(sys, phi, setup.x0);

  HadamardReport rep;
  rep.filter_strength = cfg.filter ? cfg.filter_strength : 0;
  rep.filter_order = cfg.filter_order;
  auto run_one = [&](double eps) {
    SolverConfig c = cfg;
    if (homog) {
      c.L = setup.box_factor * p.delta * std::pow(eps, 1 - p.h);
      c.origin = setup.x0 - 0.5 * c.L;
    } else if (phi.domain.lo.size() == 1 && phi.domain.hi.size() == 1) {
      c.L = phi.domain.hi(0) - phi.domain.lo(0);
      c.origin = phi.domain.lo(0);
    }
    c.n = std::max(64, wavepacket_nodes(p.xi0, eps, p.h, p.delta, c.L, setup.min_nodes_per_wave,
                                        setup.min_nodes_in_ball));
    c.t_end = std::pow(eps, p.h) * p.T(eps);

    WavePacketSpec sp;
    sp.K = p.K;
    sp.xi0 = p.xi0;
    sp.x0 = setup.x0;
    sp.delta = p.delta;
    sp.eps = eps;
    sp.h = p.h;
    sp.ebar = [e](double) { return e; };
    sp.comps = N;
    sp.n = c.n;
    sp.L = c.L;
    sp.origin = c.origin;
    sp.min_nodes_per_wave = setup.min_nodes_per_wave;
    sp.min_nodes_in_ball = setup.min_nodes_in_ball;
    const GridFunction packet = build_wavepacket(sp);

    GridFunction phi0(N, c.n, c.L, c.origin);
    for (int j = 0; j < c.n; ++j) phi0.values.col(j) = phi.at(sys, 0.0, vec1(phi0.x(j))).cast<cplx>();
    GridFunction u0 = phi0;
    u0.values += packet.values;

    if (c.dt <= 0) {
      double speed = 0;
      for (int k = 0; k <= 8; ++k) {
        const double t = c.t_end * k / 8;
        for (int j = 0; j < c.n; j += std::max(1, c.n / 64))
          speed = std::max(speed, spectral_radius(sys.A(0, t, vec1(phi0.x(j)), phi.at(sys, t, vec1(phi0.x(j))))));
      }
      c.dt = c.auto_dt(std::max(speed, max_char_speed(sys, 0.0, u0)));
    }
    // Keep the two stored trajectories under about 512 MiB.
    const double steps = std::ceil(c.t_end / c.dt);
    const double bytes = 2.0 * steps * c.n * N * sizeof(cplx) / std::max(1, c.sample_every);
    if (bytes > 512.0 * (1 << 20)) c.sample_every = static_cast<int>(std::ceil(steps * (2.0 * c.n * N * sizeof(cplx)) / (512.0 * (1 << 20))));
    const Trajectory tu = evolve(sys, u0, c);
    const Trajectory tp = evolve(sys, phi0, c);
    return hadamard_ratio(tu, tp, p, eps, setup.x0);
  };
  rep.rows = parallel_map(ladder, run_one, setup.workers);
  for (const HadamardRow& row : rep.rows) rep.any_breakdown = rep.any_breakdown || row.breakdown;

  std::vector<double> lx, ly;
  for (const HadamardRow& r : rep.rows)
    if (r.ratio > 0) {
      lx.push_back(std::log(r.eps));
      ly.push_back(std::log(r.ratio));
    }
  if (lx.size() >= 2) rep.log_slope = fit_line(lx, ly).slope;
  auto lo = std::min_element(rep.rows.begin(), rep.rows.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  auto hi = std::max_element(rep.rows.begin(), rep.rows.end(), [](auto& a, auto& b) { return a.eps < b.eps; });
  rep.growth_factor = hi->ratio > 0 ? lo->ratio / hi->ratio : 0.0;
  if (rep.growth_factor >= 10) rep.verdict = rep.any_breakdown ? "breakdown" : "unstable";
  else if (std::abs(rep.log_slope) <= 0.1) rep.verdict = "stable";
  else rep.verdict = rep.any_breakdown ? "breakdown" : "inconclusive";
  return rep;
}

FreeSolutionResult free_solution_compare(const SystemSpec& sys, const ReferenceSolution& phi, double eps,
                                         const Classification& cls, double t_end, const SolverConfig& cfg,
                                         const FreeSolutionSetup& st) {
  const int N = sys.N;
  const double h = cls.h;
  const double fast = std::pow(eps, h), slow = std::pow(eps, 1 - h);
  CVec e = st.ebar.size() ? st.ebar : CVec(CVec::Unit(N, 0));
  e /= e.norm();

  FreeSolutionResult res;
  res.eps = eps;
  res.t_end = t_end;
  const int need = wavepacket_nodes(st.xi0, fast, 1.0, st.delta, st.L, 8, 16);
  const int n = std::max(st.n, need);
  res.n = n;
  GridFunction v0(N, n, st.L, -0.5 * st.L);
  for (int j = 0; j < n; ++j) {
    const double x = v0.x(j);
    v0.values.col(j) = std::exp(cplx(0, x * st.xi0 / fast)) * plateau_cutoff(x, st.delta) * e;
  }

  SolverConfig c = cfg;
  c.t_end = fast * t_end;
  LinearizedFrame fr;
  fr.eps = eps;
  fr.h = h;
  fr.x0 = vec1(st.x0);
  const Trajectory tr = evolve_linearized(sys, phi, v0, fr, c);
  if (tr.breakdown) throw NumericalError("free_solution_compare: linearized evolution broke down: " + tr.reason);
  const GridFunction& vl = tr.u.back();

  // Symbol S(0;t, x, ε^hξ_k) for the significant modes of v0.
  const CMat m0 = tr.u.front().modes();
  const double mmax = m0.cwiseAbs().maxCoeff();
  auto symbol_at = [&](double s, double x, double xi) {
    const Vec X = vec1(st.x0 + slow * x);
    return symbol_from_state(sys, fast * s, X, vec1(xi), phi.at(sys, fast * s, X));
  };
  bool constant = true;
  {
    const Mat ref = symbol_at(0, 0, 1);
    for (int q = 0; q < 8 && constant; ++q)
      for (double s : {0.0, 0.5 * t_end, t_end})
        if ((symbol_at(s, v0.x(q * n / 8), 1) - ref).cwiseAbs().maxCoeff() > 1e-14 * (1 + ref.norm())) {
          constant = false;
          break;
        }
  }
  res.constant_coefficients = constant;
  const int nc = constant ? 1 : st.coarse_x;
  FlowConfig fc;
  fc.eps = eps;
  fc.h = h;
  fc.ell = cls.ell;
  fc.rtol = constant ? 1e-12 : 1e-9;
  fc.atol = 1e-16;
  fc.max_step = 0.05;
  fc.check_flow = false;
  const double sign = st.flip_flow ? -1.0 : 1.0;

  GridFunction w(N, n, st.L, v0.origin);
  for (int k = 0; k < n; ++k) {
    if (m0.col(k).cwiseAbs().maxCoeff() <= 1e-13 * mmax) continue;
    ++res.modes;
    const double xi = (2 * k == n) ? 0.0 : 2 * kPi / st.L * folded(k, n);
    std::vector<CMat> S(static_cast<size_t>(nc));
    for (int q = 0; q < nc; ++q) {
      const double xq = v0.origin + st.L * q / nc;
      AStarSampler a = [&, xq](double s) { return CMat(sign * symbol_at(s, xq, fast * xi).cast<cplx>()); };
      S[static_cast<size_t>(q)] = integrate_symbolic_flow(a, fc, 0.0, t_end).S.back();
    }
    CMat Sx(N * N, n);
    if (constant) {
      for (int j = 0; j < n; ++j) Sx.col(j) = S[0].reshaped();
    } else {
      for (int ab = 0; ab < N * N; ++ab) {
        CVec coarse(nc);
        for (int q = 0; q < nc; ++q) coarse(q) = S[static_cast<size_t>(q)].reshaped()(ab);
        const CVec ch = fft(coarse);
        CVec fine = CVec::Zero(n);
        for (int q = 0; q < nc; ++q) {
          const int f = folded(q, nc);
          if (2 * q == nc) {
            fine(nc / 2) += 0.5 * ch(q);
            fine(n - nc / 2) += 0.5 * ch(q);
          } else {
            fine(f >= 0 ? f : n + f) += ch(q);
          }
        }
        Sx.row(ab) = ifft(fine).transpose();
      }
    }
    const CVec mk = m0.col(k);
    for (int j = 0; j < n; ++j) {
      const CMat Sj = Sx.col(j).reshaped(N, N);
      w.values.col(j) += std::exp(cplx(0, xi * (v0.x(j) - v0.origin))) * (Sj * mk);
    }
  }
  GridFunction d = vl;
  d.values -= w.values;
  res.rel_error = d.l2_norm() / vl.l2_norm();
  return res;
}

}  // namespace hypflow
