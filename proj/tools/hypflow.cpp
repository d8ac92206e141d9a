#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "hypflow/airy.hpp"
#include "hypflow/branching.hpp"
#include "hypflow/config.hpp"
#include "hypflow/example_systems.hpp"
#include "hypflow/linalg.hpp"
#include "hypflow/parallel.hpp"
#include "hypflow/pde_sim.hpp"
#include "hypflow/report.hpp"
#include "hypflow/semiclassical.hpp"
#include "hypflow/symbolic_flow.hpp"

using namespace hypflow;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kBreakdown = 4 };

struct BreakdownExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliState {
  std::string config_path, ladder, example, state, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, margin;
  ParamMap params;
  std::map<std::string, double> experiment;
};

// Flag name → experiment key; `--alpha` belongs to the example parameters, so the
// Hadamard exponent is `--hadamard-alpha`.
const std::vector<std::pair<std::string, std::string>>& experiment_flags() {
  static const std::vector<std::pair<std::string, std::string>> f = {
      {"--K", "K"},
      {"--hadamard-alpha", "alpha"},
      {"--m", "m"},
      {"--delta", "delta"},
      {"--T-star", "T_star"},
      {"--n", "n"},
      {"--dt", "dt"},
      {"--t-end", "t_end"},
      {"--xi0", "xi0"},
      {"--x0", "x0"},
      {"--filter-strength", "filter_strength"},
      {"--gamma-plus", "gamma_plus"},
      {"--gamma-minus", "gamma_minus"},
      {"--scale-h", "h"},
      {"--ell", "ell"},
      {"--box-factor", "box_factor"},
      {"--samples", "samples"},
      {"--nodes-per-wave", "nodes_per_wave"}};
  return f;
}

std::vector<double> parse_ladder(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--eps-ladder: cannot parse '" + item + "'");
    }
  }
  return out;
}

void add_common(CLI::App* sub, CliState& st, bool with_example) {
  sub->add_option("--config", st.config_path, "INI or JSON run configuration");
  sub->add_option("--out", st.out, "output directory (stdout when omitted)");
  sub->add_option("--seed", st.seed, "seed recorded with the outputs and used for random probes");
  sub->add_option("--eps-ladder", st.ladder, "comma-separated epsilon values");
  sub->add_option("--tol", st.tol, "equality tolerance");
  sub->add_option("--margin", st.margin, "strict-inequality margin");
  if (with_example) {
    sub->add_option("--example", st.example, "registry name (see list-examples)");
    sub->add_option("--state", st.state, "reference state; defaults to the first listed");
    std::set<std::string> keys;
    for (const auto& e : example_registry())
      for (const auto& [k, v] : e.defaults) keys.insert(k);
    for (const std::string& k : keys)
      sub->add_option_function<double>("--" + k, [&st, k](double v) { st.params[k] = v; }, "example parameter");
  }
  for (const auto& [flag, key] : experiment_flags())
    sub->add_option_function<double>(flag, [&st, key = key](double v) { st.experiment[key] = v; }, "override");
}

RunConfig assemble(const CliState& st, const std::string& command) {
  RunConfig c = st.config_path.empty() ? RunConfig{} : RunConfig::load(st.config_path);
  c.command = command;
  if (!st.example.empty()) c.example = st.example;
  if (!st.state.empty()) c.state = st.state;
  for (const auto& [k, v] : st.params) c.params[k] = v;
  for (const auto& [k, v] : st.experiment) c.experiment[k] = v;
  if (!st.ladder.empty()) c.eps_ladder = parse_ladder(st.ladder);
  if (st.tol) c.tol_eq = *st.tol;
  if (st.margin) c.tol_margin = *st.margin;
  if (!st.out.empty()) c.out_dir = st.out;
  if (st.seed) c.seed = *st.seed;
  c.validate();
  return c;
}

struct ExampleContext {
  const ExampleRegistryEntry* entry = nullptr;
  ParamMap params;
  SystemSpec sys;
  ReferenceState state;
};

ExampleContext load_example(RunConfig& c) {
  if (c.example.empty()) throw ConfigError("--example is required");
  ExampleContext ctx;
  ctx.entry = &find_example(c.example);
  ctx.params = merge_params(*ctx.entry, c.params);
  if (c.state.empty()) c.state = ctx.entry->state_names.front();
  ctx.sys = ctx.entry->factory(ctx.params);
  ctx.state = ctx.entry->state(c.state, ctx.params);
  return ctx;
}

// Writes to <out>/<name>, or to stdout when no output directory is set.
void emit(const RunConfig& c, const std::string& name, const std::string& body) {
  if (c.out_dir.empty()) {
    std::cout << body;
    if (!body.empty() && body.back() != '\n') std::cout << '\n';
    return;
  }
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw ConfigError("cannot create " + c.out_dir + ": " + ec.message());
  const auto path = std::filesystem::path(c.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << body;
  if (!body.empty() && body.back() != '\n') f << '\n';
}

Tolerances tolerances(const RunConfig& c) { return {c.tol_eq, c.tol_margin}; }

int cmd_list_examples() {
  for (const auto& e : example_registry()) {
    std::cout << e.name << "\n  " << e.citation << "\n  " << e.description << "\n  states:";
    for (const auto& s : e.state_names) std::cout << ' ' << s;
    std::cout << "\n  params:";
    if (e.defaults.empty()) std::cout << " none";
    for (const auto& [k, v] : e.defaults) std::cout << ' ' << k << '=' << fmt_num(v);
    std::cout << '\n';
  }
  return kOk;
}

int cmd_classify(RunConfig c) {
  ExampleContext ctx = load_example(c);
  const Classification cls = classify(ctx.sys, ctx.state.phi, ctx.state.region, tolerances(c));
  std::optional<BranchData> branch;
  std::optional<RateReport> rates;
  if (cls.has_witness && !ctx.sys.symbol_only) {
    const SymbolField A = make_symbol_field(ctx.sys, ctx.state.phi);
    if (cls.regime == Regime::NonSemisimpleTransition)
      branch = compute_branch(A, cls.witness.x, cls.witness.xi, cls.witness.lambda.real());
    if (cls.regime == Regime::Elliptic || cls.regime == Regime::NonSemisimpleTransition ||
        cls.regime == Regime::SemisimpleTransition) {
      RateReport r;
      if (cls.regime == Regime::Elliptic) r.c0 = estimate_c0(A, cls.witness.x, cls.witness.xi, c.get_or("delta", 0.1));
      std::tie(r.gamma_minus, r.gamma_plus) =
          growth_rate(cls, branch ? &*branch : nullptr, cls.witness.x, cls.witness.xi, r.c0);
      rates = r;
    }
  }
  const std::string json =
      classification_json(cls, branch ? &*branch : nullptr, rates ? &*rates : nullptr, c.canonical_compact());
  emit(c, "classification.json", json);
  std::ostream& line = c.out_dir.empty() ? std::cerr : std::cout;
  line << "regime: " << to_string(cls.regime) << " ell=" << fmt_num(cls.ell) << " h=" << fmt_num(cls.h)
       << " zeta=" << fmt_num(cls.zeta) << '\n';
  return kOk;
}

int cmd_branch(RunConfig c) {
  ExampleContext ctx = load_example(c);
  const Classification cls = classify(ctx.sys, ctx.state.phi, ctx.state.region, tolerances(c));
  if (cls.regime != Regime::NonSemisimpleTransition)
    throw ConfigError("branch: needs a non-semisimple transition witness, got " + to_string(cls.regime));
  const SymbolField A = make_symbol_field(ctx.sys, ctx.state.phi);
  const int samples = static_cast<int>(c.get_or("samples", 11));
  const double radius = c.get_or("delta", 0.2);
  std::vector<double> offsets;
  for (int k = 0; k < samples; ++k) offsets.push_back(samples == 1 ? 0.0 : -radius + 2 * radius * k / (samples - 1));

  struct Row {
    BranchData b;
    std::string status = "ok";
  };
  const auto rows = parallel_map(offsets, [&](double off) {
    Row r;
    Vec x = cls.witness.x;
    x(0) += off;
    try {
      r.b = compute_branch(A, x, cls.witness.xi, cls.witness.lambda.real());
    } catch (const std::exception& e) {
      r.b.x = x;
      r.b.xi = cls.witness.xi;
      r.status = e.what();
    }
    return r;
  });
  std::ostringstream os;
  CsvWriter w(os, {"x", "xi", "mu", "tau_star", "e0", "negative_root", "mu_iterations", "tau_iterations", "status"},
              c.canonical_compact());
  for (const Row& r : rows) {
    w.cell(r.b.x(0)).cell(r.b.xi(0)).cell(r.b.mu).cell(r.b.tau_star).cell(r.b.e0).cell(r.b.negative_root);
    w.cell(r.b.mu_diag.iterations).cell(r.b.tau_diag.iterations).cell(r.status);
    w.end_row();
  }
  emit(c, "branch.csv", os.str());
  return kOk;
}

int cmd_flow(RunConfig c) {
  ExampleContext ctx = load_example(c);
  const Classification cls = classify(ctx.sys, ctx.state.phi, ctx.state.region, tolerances(c));
  if (!cls.has_witness || cls.regime == Regime::HyperbolicPersistent || cls.regime == Regime::Indeterminate)
    throw ConfigError("flow: no growth regime to follow (" + to_string(cls.regime) + ")");
  const SymbolField A = make_symbol_field(ctx.sys, ctx.state.phi);
  const Vec x0 = cls.witness.x, xi0 = cls.witness.xi;
  const double lam0 = cls.witness.lambda.real();

  std::optional<BranchData> branch;
  MuSampler mu;
  QSampler Q;
  if (cls.regime == Regime::NonSemisimpleTransition) {
    branch = compute_branch(A, x0, xi0, lam0);
    mu = [A, lam0](double t, const Vec& x, const Vec& xi) { return solve_mu_star(A, t, x, xi, lam0); };
    Q = [A, mu](double t, const Vec& x, const Vec& xi) { return block_reduce_2x2(A(t, x, xi), mu(t, x, xi)).Q; };
  } else {
    mu = [lam0](double, const Vec&, const Vec&) { return lam0; };
  }
  double c0 = 0;
  if (cls.regime == Regime::Elliptic) c0 = estimate_c0(A, x0, xi0, c.get_or("delta", 0.1));
  auto [gm, gp] = growth_rate(cls, branch ? &*branch : nullptr, x0, xi0, c0);
  gm = c.get_or("gamma_minus", gm);
  gp = c.get_or("gamma_plus", gp);
  const double T_star = c.get_or("T_star", HadamardParams::defaults(cls.h, cls.ell, gm).T_star);
  const std::vector<double> ladder = c.eps_ladder.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : c.eps_ladder;
  const int samples = static_cast<int>(c.get_or("samples", 16));
  const Vec xframe = Vec::Zero(x0.size());

  struct Sweep {
    double eps = 0;
    std::vector<SymbolicFlowResult> flows;
    GrowthEnvelope env;
    UpperBoundReport upper;
    LowerBoundReport lower;
  };
  auto run = [&](double eps) {
    Sweep s;
    s.eps = eps;
    FlowConfig fc = FlowConfig::for_ell(eps, cls.ell);
    fc.T_star = T_star;
    const double T = fc.T();
    fc.max_step = c.get_or("dt", T / 200);
    fc.validate();
    const double tstar = branch ? branch->tau_star / std::pow(eps, cls.h) : 0.0;
    s.env = GrowthEnvelope::constant(cls.ell, gp, tstar);
    GrowthEnvelope lower_env = GrowthEnvelope::constant(cls.ell, gm, tstar);
    const AStarSampler a = assemble_A_star(A, Q, mu, eps, cls.h, x0, nullptr, xframe, xi0);
    std::vector<double> grid;
    for (int k = 1; k < samples; ++k) grid.push_back(T * k / samples);
    for (double tau : {0.0, 0.25 * T}) {
      std::vector<double> g;
      for (double t : grid)
        if (t > tau) g.push_back(t);
      s.flows.push_back(integrate_symbolic_flow(a, fc, tau, T, g));
    }
    SymbolicFlowResult all = s.flows.front();
    all.t.insert(all.t.end(), s.flows.back().t.begin(), s.flows.back().t.end());
    all.S.insert(all.S.end(), s.flows.back().S.begin(), s.flows.back().S.end());
    s.upper = verify_upper_bound(s.flows.front(), s.env, cls.zeta, eps, xframe, xi0);
    const UpperBoundReport u2 = verify_upper_bound(s.flows.back(), s.env, cls.zeta, eps, xframe, xi0);
    if (u2.max_ratio > s.upper.max_ratio) s.upper = u2;
    std::function<CVec(const Vec&)> ebar;
    const int N = static_cast<int>(a(0).rows());
    if (cls.regime == Regime::NonSemisimpleTransition) {
      ebar = [N](const Vec&) { return CVec(CVec::Unit(N, 1)); };
    } else {
      Eigen::ComplexEigenSolver<CMat> es(a(T));
      Eigen::Index top = 0;
      es.eigenvalues().imag().maxCoeff(&top);
      CVec v = es.eigenvectors().col(top).normalized();
      ebar = [v](const Vec&) { return v; };
    }
    s.lower = verify_lower_bound({s.flows.front()}, {xframe}, lower_env, ebar, cls.zeta, eps, xi0);
    return s;
  };
  const std::vector<Sweep> sweeps = parallel_map(ladder, run);

  std::ostringstream rows, summary;
  CsvWriter w(rows, {"eps", "x", "xi", "tau", "t", "max_abs_entry", "envelope", "ratio", "limit", "bounded"},
              c.canonical_compact());
  CsvWriter ws(summary,
               {"eps", "T", "gamma_minus", "gamma_plus", "max_upper_ratio", "upper_limit", "upper_bounded",
                "min_lower_ratio", "lower_floor", "lower_bounded", "flow_residual", "liouville_residual"},
               c.canonical_compact());
  for (const Sweep& s : sweeps) {
    for (const SymbolicFlowResult& f : s.flows) {
      for (size_t k = 0; k < f.t.size(); ++k) {
        SymbolicFlowResult one;
        one.tau = f.tau;
        one.t = {f.t[k]};
        one.S = {f.S[k]};
        const UpperBoundReport u = verify_upper_bound(one, s.env, cls.zeta, s.eps, xframe, xi0);
        const double env = eval_growth(s.env, GammaChoice::Upper, f.tau, f.t[k], xframe, xi0);
        w.cell(s.eps).cell(x0(0)).cell(xi0(0)).cell(f.tau).cell(f.t[k]).cell(f.S[k].cwiseAbs().maxCoeff());
        w.cell(env).cell(u.max_ratio).cell(u.limit).cell(u.bounded);
        w.end_row();
      }
    }
    const SymbolicFlowResult& f0 = s.flows.front();
    ws.cell(s.eps).cell(f0.t.back()).cell(gm).cell(gp).cell(s.upper.max_ratio).cell(s.upper.limit);
    ws.cell(s.upper.bounded).cell(s.lower.min_ratio).cell(s.lower.floor).cell(s.lower.bounded_below);
    ws.cell(f0.flow_residual).cell(f0.liouville_residual);
    ws.end_row();
  }
  emit(c, "flow.csv", rows.str());
  emit(c, "flow_summary.csv", summary.str());
  return kOk;
}

int cmd_airy(RunConfig c) {
  const double t0 = c.get_or("x0", -10), t1 = c.get_or("t_end", 30);
  const int samples = static_cast<int>(c.get_or("samples", 81));
  if (samples < 2 || !(t1 > t0)) throw ConfigError("airy: need samples >= 2 and t_end > x0");
  std::ostringstream os;
  CsvWriter w(os, {"t", "ai", "aip", "method", "wronskian_re", "wronskian_im", "wronskian_rel_err", "envelope_ratio"},
              c.canonical_compact());
  for (int k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * k / (samples - 1);
    const AiryValue v = airy_ai(t);
    const cplx W = wronskian(t);
    const double env = airy_envelope(0, t);
    const double ratio = t >= 0 ? (vector_airy(0, t) * Eigen::Vector2cd(0, 1)).norm() / env : std::nan("");
    w.cell(t).cell(v.ai.real()).cell(v.aip.real()).cell(to_string(v.method)).cell(W.real()).cell(W.imag());
    w.cell(std::abs(W - kAiryWronskian) / std::abs(kAiryWronskian)).cell(ratio);
    w.end_row();
  }
  emit(c, "airy.csv", os.str());
  return kOk;
}

int cmd_quantize_check(RunConfig c) {
  const std::vector<double> ladder =
      c.eps_ladder.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4, 1e-5} : c.eps_ladder;
  const double h = c.get_or("h", 0.5), m = c.get_or("m", 2);
  const int n = static_cast<int>(c.get_or("n", 256));
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(-1, 1);
  const double ph0 = U(rng), ph1 = U(rng);

  GridFunction u(1, n, 2 * kPi);
  for (int j = 0; j < n; ++j) u.values(0, j) = std::exp(std::cos(u.x(j) + ph0)) * cplx(1, ph1);
  auto probe = [n](double) {
    GridFunction p(1, n, 2 * kPi);
    for (int j = 0; j < n; ++j)
      p.values(0, j) = plateau_cutoff((p.x(j) - kPi) / 2.5, 1.0) * std::exp(cplx(0, 5 * p.x(j)));
    return p;
  };
  const SymbolSampler one = SymbolSampler::constant(CMat::Identity(1, 1));
  const SymbolSampler a =
      SymbolSampler::multiplier([](double xi) { return CMat(CMat::Constant(1, 1, xi / std::sqrt(1 + xi * xi))); });
  const SymbolSampler a2 = SymbolSampler::multiplier([](double xi) { return CMat(CMat::Constant(1, 1, 1 / (1 + xi * xi))); });
  SymbolSampler b;
  b.a = [](double y, double) { return CMat(CMat::Constant(1, 1, 1 + 0.5 * std::sin(y))); };
  b.slow_x = true;

  std::ostringstream os;
  CsvWriter w(os, {"check", "eps", "h", "value"}, c.canonical_compact());
  for (double e : ladder) {
    const GridFunction v = op_eps_apply(one, u, e, h);
    w.cell("identity").cell(e).cell(h).cell((v.values - u.values).norm() / u.values.norm());
    w.end_row();
  }
  const CompositionReport mult = composition_order(a, a2, ladder, h, probe);
  for (size_t i = 0; i < mult.eps.size(); ++i) {
    w.cell("multiplier_composition").cell(mult.eps[i]).cell(h).cell(mult.residual[i]);
    w.end_row();
  }
  const CompositionReport slow = composition_order(a, b, ladder, h, probe);
  for (size_t i = 0; i < slow.eps.size(); ++i) {
    w.cell("slow_x_composition").cell(slow.eps[i]).cell(h).cell(slow.residual[i]);
    w.end_row();
  }
  w.cell("slow_x_order").cell(std::nan("")).cell(h).cell(slow.order);
  w.end_row();
  std::vector<double> lx, ly;
  for (double e : ladder) {
    WavePacketSpec s;
    s.eps = e;
    s.h = h;
    s.K = 0;
    s.xi0 = c.get_or("xi0", 1);
    s.delta = c.get_or("delta", 1);
    s.comps = 1;
    s.L = 4 * s.delta * std::pow(e, 1 - h);
    s.origin = -s.L / 2;
    s.n = wavepacket_nodes(s.xi0, e, h, s.delta, s.L);
    if (s.n > (1 << 22)) continue;
    const double nm = eps_sobolev_norm(build_wavepacket(s), m, 1, 1);
    w.cell("packet_Hm_norm").cell(e).cell(h).cell(nm);
    w.end_row();
    lx.push_back(std::log(e));
    ly.push_back(std::log(nm));
  }
  if (lx.size() >= 2) {
    w.cell("packet_Hm_slope").cell(std::nan("")).cell(h).cell(fit_line(lx, ly).slope);
    w.end_row();
    w.cell("packet_Hm_slope_expected").cell(std::nan("")).cell(h).cell(-m + (1 - h) / 2);
    w.end_row();
  }
  emit(c, "quantize_check.csv", os.str());
  return kOk;
}

int cmd_simulate(RunConfig c) {
  ExampleContext ctx = load_example(c);
  if (ctx.sys.symbol_only) throw ConfigError("simulate: " + ctx.entry->name + " has no time evolution");
  const Classification cls = classify(ctx.sys, ctx.state.phi, ctx.state.region, tolerances(c));
  double h = cls.h, ell = cls.ell, gm = 0;
  const bool has_rate = cls.has_witness && (cls.regime == Regime::Elliptic ||
                                            cls.regime == Regime::NonSemisimpleTransition ||
                                            cls.regime == Regime::SemisimpleTransition);
  if (has_rate) {
    std::optional<BranchData> branch;
    const SymbolField A = make_symbol_field(ctx.sys, ctx.state.phi);
    if (cls.regime == Regime::NonSemisimpleTransition)
      branch = compute_branch(A, cls.witness.x, cls.witness.xi, cls.witness.lambda.real());
    gm = growth_rate(cls, branch ? &*branch : nullptr, cls.witness.x, cls.witness.xi).first;
  } else {
    // No growth rate exists; the run is a control and takes its scales from the config.
    h = c.get_or("h", 1.0 / (1.0 + c.get_or("ell", 0)));
    ell = c.get_or("ell", 1.0 / h - 1.0);
    gm = 1;
  }
  gm = c.get_or("gamma_minus", gm);
  if (!(gm > 0)) throw ConfigError("simulate: gamma_minus must be positive");
  HadamardParams p = HadamardParams::defaults(h, ell, gm, ctx.sys.d);
  if (auto v = c.get("K")) p.K = *v;
  if (auto v = c.get("alpha")) p.alpha = *v;
  if (auto v = c.get("m")) p.m = *v;
  if (auto v = c.get("delta")) p.delta = *v;
  if (auto v = c.get("xi0")) p.xi0 = *v;
  if (c.get("K") && !c.get("T_star")) p.T_star = 1.5 * p.K / gm;
  if (auto v = c.get("T_star")) p.T_star = *v;
  p.validate();

  SolverConfig cfg;
  if (auto v = c.get("dt")) cfg.dt = *v;
  if (auto v = c.get("filter_strength")) {
    cfg.filter_strength = *v;
    cfg.filter = *v > 0;
  }
  ExperimentSetup setup;
  setup.x0 = c.get_or("x0", cls.has_witness ? cls.witness.x(0) : 0.0);
  if (auto v = c.get("box_factor")) setup.box_factor = *v;
  if (auto v = c.get("nodes_per_wave")) setup.min_nodes_per_wave = static_cast<int>(*v);
  const std::vector<double> ladder = c.eps_ladder.empty() ? std::vector<double>{1e-2, 1e-3, 1e-4} : c.eps_ladder;
  const HadamardReport rep = run_instability_experiment(ctx.sys, ctx.state.phi, cls, p, ladder, cfg, setup);

  std::ostringstream csv;
  write_hadamard_csv(csv, rep, c.canonical_compact());
  emit(c, "hadamard.csv", csv.str());
  if (!c.out_dir.empty()) emit(c, "hadamard.json", hadamard_json(rep, p, c.canonical_compact(), c.seed));
  std::ostream& line = c.out_dir.empty() ? std::cerr : std::cout;
  line << "verdict: " << rep.verdict << " growth_factor=" << fmt_num(rep.growth_factor)
       << " log_slope=" << fmt_num(rep.log_slope) << '\n';
  if (rep.any_breakdown) throw BreakdownExit("simulate: breakdown recorded in the report");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hyperbolic-to-elliptic transition toolkit"};
  app.set_version_flag("--version", std::string("hypflow ") + kVersion);
  app.require_subcommand(1);
  CliState st;
  std::map<std::string, CLI::App*> subs;
  subs["classify"] = app.add_subcommand("classify", "classify the reference state of an example");
  subs["branch"] = app.add_subcommand("branch", "eigenvalue branch data around the witness");
  subs["flow"] = app.add_subcommand("flow", "symbolic flow envelope compliance");
  subs["airy"] = app.add_subcommand("airy", "Airy function checks");
  subs["quantize-check"] = app.add_subcommand("quantize-check", "quantization residuals");
  subs["simulate"] = app.add_subcommand("simulate", "wave-packet instability experiment");
  subs["list-examples"] = app.add_subcommand("list-examples", "print the example registry");
  for (auto& [name, sub] : subs)
    if (name != "list-examples") add_common(sub, st, name != "airy" && name != "quantize-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    std::string name;
    for (auto& [n, sub] : subs)
      if (sub->parsed()) name = n;
    if (name == "list-examples") return cmd_list_examples();
    RunConfig c = assemble(st, name);
    if (name == "classify") return cmd_classify(c);
    if (name == "branch") return cmd_branch(c);
    if (name == "flow") return cmd_flow(c);
    if (name == "airy") return cmd_airy(c);
    if (name == "quantize-check") return cmd_quantize_check(c);
    if (name == "simulate") return cmd_simulate(c);
    return kConfig;
  } catch (const BreakdownExit& e) {
    std::cerr << e.what() << '\n';
    return kBreakdown;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
