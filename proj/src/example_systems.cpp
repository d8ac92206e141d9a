#include "hypflow/example_systems.hpp"

#include <cmath>

namespace hypflow {

Pressure Pressure::cubic() {
  return {[](double u) { return u * u * u / 3 - u; }, [](double u) { return u * u - 1; }, [](double u) { return 2 * u; }};
}

SystemSpec burgers1d(std::function<double(const Vec& u)> b, std::function<Vec(const Vec& u)> F) {
  SystemSpec s;
  s.name = "burgers1d";
  s.d = 1;
  s.N = 2;
  s.flux = [b](int, double, const Vec&, const Vec& u) {
    const double bb = b(u);
    Mat A(2, 2);
    A << u(0), -bb * bb * u(1), u(1), u(0);
    return A;
  };
  s.source = [F](double, const Vec&, const Vec& u) { return F(u); };
  return s;
}

SystemSpec burgers1d(double b, double F2) {
  SystemSpec s = burgers1d([b](const Vec&) { return b; }, [F2](const Vec&) { return vec2(0, F2); });
  s.flux_du = [b](int, int k, double, const Vec&, const Vec&) {
    Mat D(2, 2);
    if (k == 0) D << 1, 0, 0, 1;
    else D << 0, -b * b, 1, 0;
    return D;
  };
  s.source_du = [](double, const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };
  return s;
}

SystemSpec burgers2d(std::function<double(const Vec& u)> b, std::function<Vec(const Vec& u)> F) {
  SystemSpec s;
  s.name = "burgers2d";
  s.d = 2;
  s.N = 2;
  s.symbol_only = true;
  s.flux = [b](int j, double, const Vec&, const Vec& u) {
    const double bb = b(u);
    Mat A(2, 2);
    if (j == 0) A << u(0), -bb * bb * u(1), u(1), u(0);
    else A << 0, -bb * bb * u(1), u(1), 0;
    return A;
  };
  s.source = [F](double, const Vec&, const Vec& u) { return F(u); };
  return s;
}

SystemSpec van_der_waals(const Pressure& p) {
  SystemSpec s;
  s.name = "vdw";
  s.d = 1;
  s.N = 2;
  auto dp = p.dp;
  auto ddp = p.ddp;
  s.flux = [dp](int, double, const Vec&, const Vec& u) {
    Mat A(2, 2);
    A << 0, 1, dp(u(0)), 0;
    return A;
  };
  if (ddp) {
    s.flux_du = [ddp](int, int k, double, const Vec&, const Vec& u) {
      Mat D = Mat::Zero(2, 2);
      if (k == 0) D(1, 0) = ddp(u(0));
      return D;
    };
  }
  return s;
}

SystemSpec kgz(double alpha, double c) {
  if (std::abs(std::abs(c) - 1) < 1e-14) throw DomainError("kgz: c must differ from -1 and 1");
  SystemSpec s;
  s.name = "kgz";
  s.d = 1;
  s.N = 4;
  s.flux = [alpha, c](int, double, const Vec&, const Vec& U) {
    Mat A(4, 4);
    A << 0, 1, alpha, 0, 1, 0, 0, 0, alpha, 0, 0, c, -2 * U(0), -2 * U(1), c, 0;
    return A;
  };
  s.source = [](double, const Vec&, const Vec& U) {
    Vec f(4);
    f << (U(2) + 1) * U(1), -(U(2) + 1) * U(0), 0, 0;
    return f;
  };
  s.flux_du = [](int, int k, double, const Vec&, const Vec&) {
    Mat D = Mat::Zero(4, 4);
    if (k == 0) D(3, 0) = -2;
    if (k == 1) D(3, 1) = -2;
    return D;
  };
  s.source_du = [](double, const Vec&, const Vec& U) {
    Mat J = Mat::Zero(4, 4);
    J(0, 1) = U(2) + 1;
    J(0, 2) = U(1);
    J(1, 0) = -(U(2) + 1);
    J(1, 2) = -U(0);
    return J;
  };
  return s;
}

SystemSpec symmetric_control(double F2) {
  SystemSpec s;
  s.name = "control";
  s.d = 1;
  s.N = 2;
  s.flux = [](int, double, const Vec&, const Vec& u) {
    Mat A(2, 2);
    A << u(0), u(1), u(1), u(0);
    return A;
  };
  s.source = [F2](double, const Vec&, const Vec&) { return vec2(0, F2); };
  s.flux_du = [](int, int k, double, const Vec&, const Vec&) {
    Mat D(2, 2);
    if (k == 0) D << 1, 0, 0, 1;
    else D << 0, 1, 1, 0;
    return D;
  };
  s.source_du = [](double, const Vec&, const Vec&) { return Mat(Mat::Zero(2, 2)); };
  return s;
}

SystemSpec degenerate_symbol_ex_not(std::function<double(double x)> a) {
  SystemSpec s;
  s.name = "ex_not";
  s.d = 1;
  s.N = 2;
  s.symbol_only = true;
  s.flux = [a](int, double t, const Vec& x, const Vec&) {
    Mat A(2, 2);
    const double xx = x(0);
    A << 0, 1, xx * xx * t - t * t + t * t * t * a(xx), 0;
    return A;
  };
  return s;
}

SystemSpec model_block(int sign) {
  SystemSpec s;
  s.name = sign < 0 ? "model_minus" : "model_plus";
  s.d = 1;
  s.N = 2;
  s.symbol_only = true;
  const double sg = sign < 0 ? -1.0 : 1.0;
  s.flux = [sg](int, double t, const Vec&, const Vec&) {
    Mat A(2, 2);
    A << 0, 1, sg * t, 0;
    return A;
  };
  return s;
}

Vec kgz_semilinear_conjugation(const Vec& U, double alpha, double c) {
  if (alpha != 0) throw DomainError("kgz_semilinear_conjugation: requires alpha = 0");
  const double ut = U(0) + U(1), vt = U(0) - U(1);
  Vec r(4);
  r << ut, vt, U(2) + U(3) + ut * ut / (2 * (1 - c)) - vt * vt / (2 * (1 + c)),
      U(2) - U(3) - ut * ut / (2 * (1 + c)) + vt * vt / (2 * (1 - c));
  return r;
}

Vec kgz_semilinear_inverse(const Vec& W, double alpha, double c) {
  if (alpha != 0) throw DomainError("kgz_semilinear_inverse: requires alpha = 0");
  const double ut = W(0), vt = W(1);
  const double np = W(2) - ut * ut / (2 * (1 - c)) + vt * vt / (2 * (1 + c));
  const double nm = W(3) + ut * ut / (2 * (1 + c)) - vt * vt / (2 * (1 - c));
  Vec r(4);
  r << 0.5 * (ut + vt), 0.5 * (ut - vt), 0.5 * (np + nm), 0.5 * (np - nm);
  return r;
}

SystemSpec kgz_semilinear_system(double c) {
  SystemSpec s;
  s.name = "kgz_semilinear";
  s.d = 1;
  s.N = 4;
  s.flux = [c](int, double, const Vec&, const Vec&) {
    Mat A = Mat::Zero(4, 4);
    A(0, 0) = 1;
    A(1, 1) = -1;
    A(2, 2) = c;
    A(3, 3) = -c;
    return A;
  };
  s.source = [c](double, const Vec&, const Vec& W) {
    const double n = kgz_semilinear_inverse(W, 0, c)(2);
    const double q = 2 * (n + 1) * W(0) * W(1) / (1 - c * c);
    Vec f(4);
    f << -(n + 1) * W(1), (n + 1) * W(0), -q, q;
    return f;
  };
  s.flux_du = [](int, int, double, const Vec&, const Vec&) { return Mat(Mat::Zero(4, 4)); };
  return s;
}

std::vector<Vec> periodic_grid_1d(int n) {
  std::vector<Vec> g;
  for (int k = 0; k < n; ++k) g.push_back(vec1(-kPi + 2 * kPi * k / n));
  return g;
}

namespace {

double param(const ParamMap& p, const std::string& k) {
  auto it = p.find(k);
  if (it == p.end()) throw ConfigError("missing parameter " + k);
  return it->second;
}

SearchRegion region_1d() { return {periodic_grid_1d(16), {vec1(1.0)}}; }

ReferenceSolution phi_1d(std::function<Vec(const Vec&)> f) {
  ReferenceSolution r;
  r.initial = std::move(f);
  r.domain.periodic = true;
  r.domain.lo = vec1(-kPi);
  r.domain.hi = vec1(kPi);
  return r;
}

ReferenceState unknown_state(const std::string& entry, const std::string& s) {
  throw ConfigError("example " + entry + " has no state " + s);
}

std::vector<ExampleRegistryEntry> build_registry() {
  std::vector<ExampleRegistryEntry> reg;

  {
    ExampleRegistryEntry e;
    e.name = "burgers1d";
    e.citation = "Burgers-type 2x2 system with symbol [[u1, -b^2 u2],[u2, u1]]";
    e.description = "b and source F = (0, F2); variant=1 uses b(u2) = 1 + u2^2 and F = (0, u1^2)";
    e.defaults = {{"b", 1.0}, {"F2", 1.0}, {"variant", 0.0}};
    e.state_names = {"transition", "elliptic", "homogeneous"};
    e.factory = [](const ParamMap& p) {
      if (param(p, "variant") != 0) {
        SystemSpec s = burgers1d([](const Vec& u) { return 1 + u(1) * u(1); },
                                 [](const Vec& u) { return vec2(0, u(0) * u(0)); });
        return s;
      }
      return burgers1d(param(p, "b"), param(p, "F2"));
    };
    e.state = [](const std::string& s, const ParamMap& p) {
      ReferenceState r;
      r.name = s;
      r.region = region_1d();
      const bool variant = param(p, "variant") != 0;
      const double F2 = param(p, "F2");
      if (s == "elliptic") {
        r.description = "phi2(0,x) = 0.5 + 0.2 cos x";
        r.phi = phi_1d([](const Vec& x) { return vec2(0.3 * std::sin(x(0)), 0.5 + 0.2 * std::cos(x(0))); });
        r.expected = Regime::Elliptic;
      } else if (s == "transition") {
        r.description = "phi1(0,x) = 0.5 + 0.2 cos x, phi2(0,x) = 0";
        r.phi = phi_1d([](const Vec& x) { return vec2(0.5 + 0.2 * std::cos(x(0)), 0.0); });
        r.expected = (variant || F2 != 0) ? Regime::SemisimpleTransition : Regime::HyperbolicPersistent;
      } else if (s == "homogeneous") {
        r.description = variant ? "phi = 0" : "phi = (0, F2 t)";
        const double rate = variant ? 0.0 : F2;
        r.phi = phi_1d([](const Vec&) { return vec2(0, 0); });
        r.phi.evolved = [rate](double t, const Vec&) { return vec2(0, rate * t); };
        r.expected = rate != 0 ? Regime::SemisimpleTransition : Regime::HyperbolicPersistent;
      } else {
        return unknown_state("burgers1d", s);
      }
      return r;
    };
    reg.push_back(e);
  }

  {
    ExampleRegistryEntry e;
    e.name = "burgers2d";
    e.citation = "two-dimensional Burgers-type system, symbol only";
    e.description = "A1 = [[u1, -b^2 u2],[u2, u1]], A2 = [[0, -b^2 u2],[u2, 0]], F = (0, F2)";
    e.defaults = {{"b", 1.0}, {"F2", 1.0}};
    e.state_names = {"transition", "elliptic"};
    e.factory = [](const ParamMap& p) {
      const double b = param(p, "b"), F2 = param(p, "F2");
      return burgers2d([b](const Vec&) { return b; }, [F2](const Vec&) { return vec2(0, F2); });
    };
    e.state = [](const std::string& s, const ParamMap& p) {
      ReferenceState r;
      r.name = s;
      for (const Vec& x : periodic_grid_1d(8)) r.region.xs.push_back(vec2(x(0), 0));
      r.region.xis = {vec2(1, 0), vec2(0, 1), vec2(1, 1), vec2(1, -1)};
      ReferenceSolution phi;
      phi.domain.periodic = true;
      if (s == "elliptic") {
        phi.initial = [](const Vec& x) { return vec2(0.3 * std::sin(x(0)), 0.5 + 0.2 * std::cos(x(1))); };
        r.expected = Regime::Elliptic;
      } else if (s == "transition") {
        phi.initial = [](const Vec& x) { return vec2(0.5 + 0.2 * std::cos(x(0)) * std::cos(x(1)), 0.0); };
        r.expected = param(p, "F2") != 0 ? Regime::SemisimpleTransition : Regime::HyperbolicPersistent;
      } else {
        return unknown_state("burgers2d", s);
      }
      r.phi = phi;
      return r;
    };
    reg.push_back(e);
  }

  {
    ExampleRegistryEntry e;
    e.name = "vdw";
    e.citation = "p-system with van der Waals pressure p(u) = u^3/3 - u";
    e.description = "d_t u1 + d_x u2 = 0, d_t u2 + d_x p(u1) = 0";
    e.defaults = {};
    e.state_names = {"transition", "elliptic", "decaying"};
    e.factory = [](const ParamMap&) { return van_der_waals(); };
    e.state = [](const std::string& s, const ParamMap&) {
      ReferenceState r;
      r.name = s;
      r.region = region_1d();
      if (s == "elliptic") {
        r.description = "phi1 = 0.5 + 0.1 sin x, p'(phi1) < 0";
        r.phi = phi_1d([](const Vec& x) { return vec2(0.5 + 0.1 * std::sin(x(0)), 0.0); });
        r.expected = Regime::Elliptic;
      } else if (s == "transition") {
        r.description = "phi1 = 1 + 0.3(1 - cos x), phi2 = 0.5 sin x; p'(phi1(0)) = 0, p'' d_x phi2 > 0";
        r.phi = phi_1d([](const Vec& x) { return vec2(1 + 0.3 * (1 - std::cos(x(0))), 0.5 * std::sin(x(0))); });
        r.expected = Regime::NonSemisimpleTransition;
      } else if (s == "decaying") {
        r.description = "phi1 = 1 + 0.3(1 - cos x), phi2 = -0.5 sin x; p'' d_x phi2 < 0";
        r.phi = phi_1d([](const Vec& x) { return vec2(1 + 0.3 * (1 - std::cos(x(0))), -0.5 * std::sin(x(0))); });
        r.expected = Regime::HyperbolicPersistent;
      } else {
        return unknown_state("vdw", s);
      }
      return r;
    };
    reg.push_back(e);
  }

  {
    ExampleRegistryEntry e;
    e.name = "kgz";
    e.citation = "Klein-Gordon-Zakharov type system in (u, v, n, m)";
    e.description = "symbol [[0,1,a,0],[1,0,0,0],[a,0,0,c],[-2u,-2v,c,0]]; miss shifts v(0,0) off -c/(2a)";
    e.defaults = {{"alpha", 1.0}, {"c", 0.5}, {"miss", 0.0}};
    e.state_names = {"witness", "small"};
    e.factory = [](const ParamMap& p) { return kgz(param(p, "alpha"), param(p, "c")); };
    e.state = [](const std::string& s, const ParamMap& p) {
      ReferenceState r;
      r.name = s;
      r.region = region_1d();
      const double alpha = param(p, "alpha"), c = param(p, "c"), miss = param(p, "miss");
      if (s == "witness") {
        if (alpha == 0) throw ConfigError("kgz witness state needs alpha != 0");
        const double sg = alpha * c > 0 ? 1.0 : -1.0;
        const double v0 = -c / (2 * alpha) + miss;
        r.description = "u = sgn(alpha c) sin x, v = -c/(2 alpha) + miss, n = m = 0";
        r.phi = phi_1d([sg, v0](const Vec& x) {
          Vec U(4);
          U << sg * std::sin(x(0)), v0, 0, 0;
          return U;
        });
        if (miss == 0) r.expected = Regime::NonSemisimpleTransition;
        else r.expected = alpha * c * miss > 0 ? Regime::HyperbolicPersistent : Regime::Elliptic;
      } else if (s == "small") {
        r.description = "u = 0.1 sin x, v = 0.1 cos x, n = m = 0";
        r.phi = phi_1d([](const Vec& x) {
          Vec U(4);
          U << 0.1 * std::sin(x(0)), 0.1 * std::cos(x(0)), 0, 0;
          return U;
        });
        r.expected = Regime::HyperbolicPersistent;
      } else {
        return unknown_state("kgz", s);
      }
      return r;
    };
    reg.push_back(e);
  }

  {
    ExampleRegistryEntry e;
    e.name = "ex_not";
    e.citation = "degenerate symbol [[0,1],[x^2 t - t^2 + t^3 a, 0]]";
    e.description = "constant a; eigenvalues cross along t = s(x) = x^2 + O(x^3)";
    e.defaults = {{"a", 0.0}};
    e.state_names = {"origin"};
    e.factory = [](const ParamMap& p) {
      const double a = param(p, "a");
      return degenerate_symbol_ex_not([a](double) { return a; });
    };
    e.state = [](const std::string& s, const ParamMap&) {
      if (s != "origin") return unknown_state("ex_not", s);
      ReferenceState r;
      r.name = s;
      r.description = "symbol family at (t, x) = (0, 0)";
      r.phi = phi_1d([](const Vec&) { return vec2(0, 0); });
      r.phi.evolved = [](double, const Vec&) { return vec2(0, 0); };
      r.region = {{vec1(0.0)}, {vec1(1.0)}};
      r.expected = Regime::Indeterminate;
      return r;
    };
    reg.push_back(e);
  }

  for (int sign : {-1, 1}) {
    ExampleRegistryEntry e;
    e.name = sign < 0 ? "model_minus" : "model_plus";
    e.citation = sign < 0 ? "canonical block [[0,1],[-t,0]]" : "canonical block [[0,1],[t,0]]";
    e.description = sign < 0 ? "non-real, non-differentiable eigenvalues +-i t^(1/2)" : "real eigenvalues +-t^(1/2)";
    e.defaults = {};
    e.state_names = {"origin"};
    e.factory = [sign](const ParamMap&) { return model_block(sign); };
    e.state = [sign, name = e.name](const std::string& s, const ParamMap&) {
      if (s != "origin") return unknown_state(name, s);
      ReferenceState r;
      r.name = s;
      r.phi = phi_1d([](const Vec&) { return vec2(0, 0); });
      r.phi.evolved = [](double, const Vec&) { return vec2(0, 0); };
      r.region = {{vec1(0.0)}, {vec1(1.0)}};
      r.expected = sign < 0 ? Regime::NonSemisimpleTransition : Regime::HyperbolicPersistent;
      return r;
    };
    reg.push_back(e);
  }

  {
    ExampleRegistryEntry e;
    e.name = "control";
    e.citation = "symmetric hyperbolic control system";
    e.description = "A = [[u1, u2],[u2, u1]], F = (0, F2)";
    e.defaults = {{"F2", 1.0}};
    e.state_names = {"homogeneous", "smooth"};
    e.factory = [](const ParamMap& p) { return symmetric_control(param(p, "F2")); };
    e.state = [](const std::string& s, const ParamMap& p) {
      ReferenceState r;
      r.name = s;
      r.region = region_1d();
      r.expected = Regime::HyperbolicPersistent;
      const double F2 = param(p, "F2");
      if (s == "homogeneous") {
        r.description = "phi = (0, F2 t)";
        r.phi = phi_1d([](const Vec&) { return vec2(0, 0); });
        r.phi.evolved = [F2](double t, const Vec&) { return vec2(0, F2 * t); };
      } else if (s == "smooth") {
        r.description = "phi = (0.3 sin x, 0.2 cos x)";
        r.phi = phi_1d([](const Vec& x) { return vec2(0.3 * std::sin(x(0)), 0.2 * std::cos(x(0))); });
      } else {
        return unknown_state("control", s);
      }
      return r;
    };
    reg.push_back(e);
  }
  return reg;
}

}  // namespace

const std::vector<ExampleRegistryEntry>& example_registry() {
  static const std::vector<ExampleRegistryEntry> reg = build_registry();
  return reg;
}

const ExampleRegistryEntry& find_example(const std::string& name) {
  for (const auto& e : example_registry())
    if (e.name == name) return e;
  throw ConfigError("unknown example: " + name);
}

ParamMap merge_params(const ExampleRegistryEntry& e, const ParamMap& overrides) {
  ParamMap p = e.defaults;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k)) throw ConfigError("example " + e.name + " has no parameter " + k);
    p[k] = v;
  }
  return p;
}

}  // namespace hypflow
