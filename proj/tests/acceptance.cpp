// Acceptance checks 1-11. Prints one [PASS]/[FAIL] line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hypflow/airy.hpp"
#include "hypflow/branching.hpp"
#include "hypflow/example_systems.hpp"
#include "hypflow/linalg.hpp"
#include "hypflow/pde_sim.hpp"
#include "hypflow/semiclassical.hpp"
#include "hypflow/symbolic_flow.hpp"

using namespace hypflow;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Classification classify_example(const std::string& name, const std::string& state, const ParamMap& over = {}) {
  const auto& e = find_example(name);
  const ParamMap p = merge_params(e, over);
  const ReferenceState st = e.state(state, p);
  return classify(e.factory(p), st.phi, st.region);
}

// 1. Wronskian constant.
Outcome wronskian_constant() {
  double worst = 0;
  for (double tau : {-10.0, -5.0, 0.0, 5.0, 10.0})
    worst = std::max(worst, std::abs(wronskian(tau) - kAiryWronskian) / std::abs(kAiryWronskian));
  return {worst <= 1e-8, fmt("max rel err %.3e (tol 1e-8)", worst)};
}

// 2. Airy asymptotics on the real ray and on the j-ray.
Outcome airy_asymptotics() {
  double C1 = 0, C2 = 0;
  const cplx rot = std::polar(1.0, kPi / 6);
  for (double t = 10; t <= 30 + 1e-12; t += 0.25) {
    const double z = 2.0 / 3.0 * std::pow(t, 1.5), q = 2 * std::sqrt(kPi) * std::pow(t, 0.25);
    const double r1 = std::abs(airy_ai(t).ai.real() * q * std::exp(z) - 1);
    const double r2 = std::abs(airy_ai(kJ * t).ai * q * rot * std::exp(-z) - 1.0);
    C1 = std::max(C1, r1 * std::pow(t, 1.5));
    C2 = std::max(C2, r2 * std::pow(t, 1.5));
  }
  return {C1 <= 0.2 && C2 <= 0.2, fmt("C(real) %.4f, C(j-ray) %.4f (limit 0.2)", C1, C2)};
}

// 3. Integrated ℓ = 1/2 model flow against the conjugated Airy matrix.
Outcome airy_flow_equivalence() {
  double worst = 0;
  for (int k = 1; k <= 16; ++k) worst = std::max(worst, conjugated_flow_compare(1e-4, 1, 0, 0, 0.25 * k));
  return {worst <= 1e-6, fmt("max entry rel dev %.3e on t in (0, 4] (tol 1e-6)", worst)};
}

struct ModelFlow {
  Classification cls;
  double gamma = 0;
  AStarSampler a;
};

ModelFlow model_flow(const std::string& name, const std::string& state, double eps) {
  const auto& e = find_example(name);
  const ReferenceState st = e.state(state, e.defaults);
  const SystemSpec sys = e.factory(e.defaults);
  ModelFlow m;
  m.cls = classify(sys, st.phi, st.region);
  const SymbolField A = make_symbol_field(sys, st.phi);
  const Vec x0 = m.cls.witness.x, xi0 = m.cls.witness.xi;
  const double lam0 = m.cls.witness.lambda.real();
  MuSampler mu = [lam0](double, const Vec&, const Vec&) { return lam0; };
  QSampler Q;
  if (m.cls.regime == Regime::NonSemisimpleTransition) {
    const BranchData b = compute_branch(A, x0, xi0, lam0);
    m.gamma = growth_rate(m.cls, &b, x0, xi0).first;
    mu = [A, lam0](double t, const Vec& x, const Vec& xi) { return solve_mu_star(A, t, x, xi, lam0); };
    Q = [A, mu](double t, const Vec& x, const Vec& xi) { return block_reduce_2x2(A(t, x, xi), mu(t, x, xi)).Q; };
  } else {
    m.gamma = growth_rate(m.cls, nullptr, x0, xi0).first;
  }
  m.a = assemble_A_star(A, Q, mu, eps, m.cls.h, x0, nullptr, Vec::Zero(x0.size()), xi0);
  return m;
}

SystemSpec constant_elliptic_block() {
  SystemSpec s;
  s.name = "constant_block";
  s.N = 2;
  s.flux = [](int, double, const Vec&, const Vec&) {
    Mat A(2, 2);
    A << 0.5, -1, 1, 0.5;  // λ₀ = 0.5 ± i
    return A;
  };
  return s;
}

double fitted_exponent(const SymbolicFlowResult& r, double p, double from) {
  std::vector<double> x, y;
  for (size_t k = 0; k < r.t.size(); ++k)
    if (r.t[k] >= from) {
      x.push_back(std::pow(r.t[k], p));
      y.push_back(std::log(norm2(r.S[k])));
    }
  return fit_line(x, y).slope;
}

// 4. Growth-exponent laws for ℓ = 1/2, 1 and 0.
Outcome growth_exponents() {
  std::ostringstream d;
  bool ok = true;

  {
    const double eps = 1e-6;
    const ModelFlow m = model_flow("model_minus", "origin", eps);
    FlowConfig fc = FlowConfig::for_ell(eps, 0.5);
    fc.T_star = HadamardParams::defaults(fc.h, 0.5, m.gamma).T_star;
    const double T = fc.T();
    fc.max_step = T / 200;
    const SymbolicFlowResult r = integrate_symbolic_flow(m.a, fc, 0, T);
    const double q = std::log(norm2(r.S.back())) / (m.gamma * std::pow(T, 1.5));
    const bool pass = m.cls.regime == Regime::NonSemisimpleTransition && std::abs(m.gamma - 2.0 / 3.0) < 1e-6 &&
                      q >= 0.97 && q <= 1.03;
    ok = ok && pass;
    d << fmt("(a) T=%.3f log|S|/(gamma T^1.5)=%.4f gamma=%.6f", T, q, m.gamma);
  }
  {
    const double eps = 1e-4;
    const ModelFlow m = model_flow("burgers1d", "homogeneous", eps);
    FlowConfig fc = FlowConfig::for_ell(eps, 1);
    fc.T_star = HadamardParams::defaults(fc.h, 1, m.gamma).T_star;
    const double T = fc.T();
    fc.max_step = T / 200;
    std::vector<double> grid;
    for (int k = 1; k < 40; ++k) grid.push_back(T * k / 40);
    const SymbolicFlowResult r = integrate_symbolic_flow(m.a, fc, 0, T, grid);
    const double g = fitted_exponent(r, 2, 0.5 * T);
    const bool pass = m.cls.regime == Regime::SemisimpleTransition && std::abs(g / m.gamma - 1) <= 0.02;
    ok = ok && pass;
    d << fmt("; (b) fitted %.5f vs gamma %.5f", g, m.gamma);
  }
  {
    const double eps = 1e-4;
    const SystemSpec sys = constant_elliptic_block();
    ReferenceSolution phi;
    phi.initial = [](const Vec&) { return vec2(0, 0); };
    const SearchRegion region{periodic_grid_1d(16), {vec1(1.0)}};
    const Classification cls = classify(sys, phi, region);
    const SymbolField A = make_symbol_field(sys, phi);
    const Vec x0 = cls.witness.x, xi0 = cls.witness.xi;
    const double lam0 = cls.witness.lambda.real();
    const double gamma = growth_rate(cls, nullptr, x0, xi0).first;
    const AStarSampler a = assemble_A_star(A, nullptr, [lam0](double, const Vec&, const Vec&) { return lam0; }, eps,
                                           cls.h, x0, nullptr, Vec::Zero(1), xi0);
    FlowConfig fc = FlowConfig::for_ell(eps, 0);
    fc.T_star = HadamardParams::defaults(fc.h, 0, gamma).T_star;
    const double T = fc.T();
    fc.max_step = T / 200;
    std::vector<double> grid;
    for (int k = 1; k < 40; ++k) grid.push_back(T * k / 40);
    const SymbolicFlowResult r = integrate_symbolic_flow(a, fc, 0, T, grid);
    const double g = fitted_exponent(r, 1, 0.5 * T);
    const double im = cls.witness.lambda.imag();
    const bool pass = cls.regime == Regime::Elliptic && std::abs(g / im - 1) <= 0.05;
    ok = ok && pass;
    d << fmt("; (c) fitted %.5f vs Im lambda0 %.5f", g, im);
  }
  return {ok, d.str()};
}

// 5. Classification table of the worked examples.
Outcome classification_table() {
  struct Row {
    const char* name;
    const char* state;
    ParamMap over;
    Regime want;
  };
  const std::vector<Row> rows = {
      {"burgers1d", "elliptic", {}, Regime::Elliptic},
      {"burgers1d", "transition", {}, Regime::SemisimpleTransition},
      {"burgers1d", "homogeneous", {}, Regime::SemisimpleTransition},
      {"burgers1d", "transition", {{"F2", 0.0}}, Regime::HyperbolicPersistent},
      {"burgers2d", "elliptic", {}, Regime::Elliptic},
      {"burgers2d", "transition", {}, Regime::SemisimpleTransition},
      {"vdw", "elliptic", {}, Regime::Elliptic},
      {"vdw", "transition", {}, Regime::NonSemisimpleTransition},
      {"vdw", "decaying", {}, Regime::HyperbolicPersistent},
      {"kgz", "witness", {}, Regime::NonSemisimpleTransition},
      {"kgz", "small", {{"alpha", 0.0}}, Regime::HyperbolicPersistent},
      {"kgz", "small", {}, Regime::HyperbolicPersistent},
  };
  int bad = 0;
  std::string miss;
  for (const Row& r : rows) {
    const Regime got = classify_example(r.name, r.state, r.over).regime;
    if (got != r.want) {
      ++bad;
      miss += std::string(" ") + r.name + "/" + r.state + "=" + to_string(got);
    }
  }
  return {bad == 0, fmt("%d/%d verdicts match", static_cast<int>(rows.size()) - bad, static_cast<int>(rows.size())) + miss};
}

// 6. KGZ jet identity at (α, c, ∂_xu) = (1, 1/2, 1).
Outcome kgz_jet() {
  const double alpha = 1, c = 0.5, ux = 1;
  const auto& e = find_example("kgz");
  const ParamMap p = merge_params(e, {{"alpha", alpha}, {"c", c}});
  const ReferenceState st = e.state("witness", p);
  const CharPolyJet J = charpoly_jet(e.factory(p), st.phi, {vec1(0), vec1(1), 0});
  const double got = (J.Pt * J.Pll).real();
  const double want = 2 * alpha * c * ux * (1 + c * c + alpha * alpha);
  const double rel = std::abs(got - want) / std::abs(want);
  return {rel <= 1e-6, fmt("computed %.10f, closed form %.10f, rel err %.3e (tol 1e-6), ratio %.3f; "
                           "differentiating det(lambda I - A) exactly gives 4 alpha c u_x (1+c^2+alpha^2) = %.10f",
                           got, want, rel, got / want, 2 * want)};
}

// 7. Discriminant identities on Burgers and van der Waals blocks.
Outcome discriminant_identities() {
  double worst = 0;
  for (const char* name : {"burgers1d", "vdw"}) {
    const auto& e = find_example(name);
    for (const std::string& s : e.state_names) {
      const ReferenceState st = e.state(s, e.defaults);
      const SystemSpec sys = e.factory(e.defaults);
      for (double x : {0.0, 0.7, -2.0}) {
        const DiscriminantReport r = discriminant_jet_crosscheck(symbol_family(sys, st.phi, vec1(x), vec1(1.0)));
        worst = std::max({worst, r.residual1, r.residual2});
      }
    }
  }
  return {worst <= 1e-6, fmt("max residual %.3e (tol 1e-6)", worst)};
}

// 8. Hadamard ratio growth for Burgers against the symmetric control system.
Outcome hadamard_experiment() {
  const auto& b = find_example("burgers1d");
  const SystemSpec bsys = b.factory(b.defaults);
  const ReferenceState bst = b.state("homogeneous", b.defaults);
  const Classification bcls = classify(bsys, bst.phi, bst.region);
  const double gm = growth_rate(bcls, nullptr, bcls.witness.x, bcls.witness.xi).first;

  HadamardParams hp;
  hp.alpha = 1;
  hp.m = 1 + (1 - bcls.h) / 2;
  hp.K = 3;
  hp.h = bcls.h;
  hp.ell = bcls.ell;
  hp.gamma_minus = gm;
  hp.T_star = 1.5 * hp.K / gm;
  hp.delta = 1;
  hp.validate();

  SolverConfig cfg;
  ExperimentSetup su;
  su.min_nodes_per_wave = 16;
  const std::vector<double> ladder = {1e-2, 1e-3, 1e-4};
  const HadamardReport rb = run_instability_experiment(bsys, bst.phi, bcls, hp, ladder, cfg, su);

  const auto& c = find_example("control");
  const SystemSpec csys = c.factory(c.defaults);
  const ReferenceState cst = c.state("homogeneous", c.defaults);
  const Classification ccls = classify(csys, cst.phi, cst.region);
  const HadamardReport rc = run_instability_experiment(csys, cst.phi, ccls, hp, ladder, cfg, su);

  const double factor = rb.rows.back().ratio / rb.rows.front().ratio;
  int breakdowns = 0;
  for (const HadamardRow& w : rb.rows) breakdowns += w.breakdown;
  return {factor >= 10 && std::abs(rc.log_slope) <= 0.1,
          fmt("Burgers ratios %.3e, %.3e, %.3e (factor %.3e, need >= 10, %d rows stopped by the breakdown detector); "
              "control slope %.4f (limit 0.1)",
              rb.rows[0].ratio, rb.rows[1].ratio, rb.rows[2].ratio, factor, breakdowns, rc.log_slope)};
}

SystemSpec slowly_varying_block(double amp) {
  SystemSpec s;
  s.name = "slow_block";
  s.N = 2;
  s.flux = [amp](int, double, const Vec& x, const Vec&) {
    const double a = 0.5 + amp * std::sin(x(0));
    Mat A(2, 2);
    A << a, -1, 1, a;
    return A;
  };
  s.flux_du = [](int, int, double, const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };
  return s;
}

// 9. Linearized evolution against op_ε(S(0;t)) applied to the datum.
Outcome free_solution() {
  ReferenceSolution phi;
  phi.initial = [](const Vec&) { return vec2(0, 0); };
  phi.evolved = [](double, const Vec&) { return vec2(0, 0); };
  const Classification cls = Classification::with_regime(Regime::Elliptic);
  SolverConfig cfg;
  cfg.filter = false;
  const std::vector<double> ladder = {1e-1, 3e-2, 1e-2, 3e-3};
  double const_err = 0;
  std::vector<double> lx, ly;
  bool decreasing = true;
  for (double e : ladder) {
    const double T = 0.5 * std::abs(std::log(e));
    const_err = std::max(const_err, free_solution_compare(slowly_varying_block(0), phi, e, cls, T, cfg).rel_error);
    const double err = free_solution_compare(slowly_varying_block(0.2), phi, e, cls, T, cfg).rel_error;
    if (!ly.empty() && std::log(err) >= ly.back()) decreasing = false;
    lx.push_back(std::log(e));
    ly.push_back(std::log(err));
  }
  const double order = fit_line(lx, ly).slope;
  return {const_err <= 1e-8 && decreasing && order >= 0.5,
          fmt("constant coefficients max err %.3e (tol 1e-8); slowly varying errors %.3e .. %.3e, fitted order %.3f "
              "(need >= 0.5)",
              const_err, std::exp(ly.front()), std::exp(ly.back()), order)};
}

// 10. Quantization residuals.
Outcome semiclassical_residuals() {
  GridFunction u(2, 256, 2 * kPi);
  for (int j = 0; j < 256; ++j) {
    u.values(0, j) = std::exp(std::cos(u.x(j))) * cplx(1, 0.3);
    u.values(1, j) = std::sin(2 * u.x(j)) + 0.5 * std::cos(5 * u.x(j));
  }
  double id_err = 0;
  for (double e : {1e-2, 1e-4}) {
    const GridFunction v = op_eps_apply(SymbolSampler::constant(CMat::Identity(2, 2)), u, e, 0.5);
    id_err = std::max(id_err, (v.values - u.values).norm() / u.values.norm());
  }

  auto scalar = [](cplx z) {
    CMat m(1, 1);
    m(0, 0) = z;
    return m;
  };
  const SymbolSampler a = SymbolSampler::multiplier([scalar](double xi) { return scalar(xi / std::sqrt(1 + xi * xi)); });
  SymbolSampler b;
  b.a = [scalar](double y, double) { return scalar(1 + 0.5 * std::sin(y)); };
  b.slow_x = true;
  const auto probe = [](double) {
    GridFunction p(1, 256, 2 * kPi);
    for (int j = 0; j < 256; ++j) p.values(0, j) = plateau_cutoff((p.x(j) - kPi) / 2.5, 1.0) * std::exp(cplx(0, 5 * p.x(j)));
    return p;
  };
  const CompositionReport comp = composition_order(a, b, {1e-2, 1e-3, 1e-4, 1e-5}, 0.5, probe);

  const double m = 2, h = 0.5;
  std::vector<double> lx, ly;
  for (double e : {1e-3, 1e-4, 1e-5}) {
    WavePacketSpec s;
    s.eps = e;
    s.h = h;
    s.L = 4 * std::sqrt(e);
    s.origin = -s.L / 2;
    s.n = wavepacket_nodes(1, e, h, 1, s.L);
    lx.push_back(std::log(e));
    ly.push_back(std::log(eps_sobolev_norm(build_wavepacket(s), m, 1, 1)));
  }
  const double slope = fit_line(lx, ly).slope, want = -m + (1 - h) / 2;
  const double rel = std::abs(slope / want - 1);
  return {id_err <= 1e-12 && comp.order >= 0.9 && rel <= 0.02,
          fmt("identity err %.3e (tol 1e-12); composition order %.4f (need >= 0.9); H^m slope %.4f vs %.4f "
              "(rel %.4f, tol 0.02)",
              id_err, comp.order, slope, want, rel)};
}

// 11. Randomized invariant suites.
Outcome invariant_suites() {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N01;
  std::uniform_real_distribution<double> U(0, 1);
  const int cases = 100;

  double flow_res = 0, liou_res = 0;
  for (int k = 0; k < cases; ++k) {
    const int n = 2 + k % 2;
    CMat A0(n, n), A1(n, n);
    for (int i = 0; i < n * n; ++i) {
      A0(i) = 0.5 * cplx(N01(rng), 0.3 * N01(rng));
      A1(i) = 0.5 * cplx(N01(rng), 0.3 * N01(rng));
    }
    const double w = 0.5 + U(rng);
    FlowConfig cfg = FlowConfig::for_ell(0.05, k % 3 == 0 ? 0.0 : (k % 3 == 1 ? 0.5 : 1.0));
    const SymbolicFlowResult r =
        integrate_symbolic_flow([A0, A1, w](double t) { return CMat(A0 + std::sin(w * t) * A1); }, cfg, 0, 2 + U(rng));
    flow_res = std::max(flow_res, r.flow_residual);
    liou_res = std::max(liou_res, r.liouville_residual);
  }

  double env_err = 0;
  for (int k = 0; k < cases; ++k) {
    double t[3] = {5 * U(rng), 5 * U(rng), 5 * U(rng)};
    std::sort(t, t + 3);
    const double ell = k % 3 == 0 ? 0.0 : (k % 3 == 1 ? 0.5 : 1.0), ts = 2 * U(rng) - 0.5, g = 0.1 + U(rng);
    const double lhs = envelope_value(g, ell, ts, t[0], t[1]) * envelope_value(g, ell, ts, t[1], t[2]);
    const double rhs = envelope_value(g, ell, ts, t[0], t[2]);
    env_err = std::max(env_err, std::abs(lhs / rhs - 1));
  }

  double conj_err = 0;
  for (int k = 0; k < cases; ++k) {
    Mat M(4, 4);
    for (int i = 0; i < 16; ++i) M(i) = N01(rng);
    const auto sp = spectrum(M);
    for (const cplx& z : sp) {
      double best = 1e300;
      for (const cplx& w : sp) best = std::min(best, std::abs(w - std::conj(z)));
      conj_err = std::max(conj_err, best / (1 + std::abs(z)));
    }
  }

  double hom_err = 0;
  const auto& e = find_example("vdw");
  const SystemSpec vdw = e.factory(e.defaults);
  const ReferenceState st = e.state("elliptic", e.defaults);
  for (int k = 0; k < cases; ++k) {
    const double s = 0.1 + 10 * U(rng), x = 2 * kPi * U(rng);
    const auto a = spectrum(eval_principal_symbol(vdw, st.phi, 0, vec1(x), vec1(1.0)));
    const auto b = spectrum(eval_principal_symbol(vdw, st.phi, 0, vec1(x), vec1(s)));
    for (size_t i = 0; i < a.size(); ++i) hom_err = std::max(hom_err, std::abs(b[i] - s * a[i]) / s);
  }

  const bool ok = flow_res <= 1e-7 && liou_res <= 1e-7 && env_err <= 1e-12 && conj_err <= 1e-10 && hom_err <= 1e-10;
  return {ok, fmt("%d cases each: flow composition %.2e (tol 1e-7), Liouville %.2e (tol 1e-7), envelope %.2e "
                  "(tol 1e-12), conjugate pairs %.2e (tol 1e-10), xi-homogeneity %.2e (tol 1e-10)",
                  cases, flow_res, liou_res, env_err, conj_err, hom_err)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hypflow acceptance checks"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "Wronskian constant", 1, wronskian_constant},
      {2, "Airy asymptotics", 1, airy_asymptotics},
      {3, "Airy-flow equivalence", 5, airy_flow_equivalence},
      {4, "growth-exponent laws", 30, growth_exponents},
      {5, "classification table", 5, classification_table},
      {6, "KGZ jet identity", 1, kgz_jet},
      {7, "discriminant identities", 1, discriminant_identities},
      {8, "Hadamard experiment", 600, hadamard_experiment},
      {9, "free-solution validation", 120, free_solution},
      {10, "semiclassical calculus residuals", 60, semiclassical_residuals},
      {11, "invariant suites", 60, invariant_suites},
  };

  bool ok = true;
  for (const Criterion& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.budget_s;
    ok = ok && pass;
    std::printf("[%s] criterion %d (%s): %s; runtime %.2f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return ok ? 0 : 1;
}
