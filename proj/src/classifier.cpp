#include "hypflow/classifier.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "hypflow/linalg.hpp"

namespace hypflow {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Elliptic: return "Elliptic";
    case Regime::NonSemisimpleTransition: return "NonSemisimpleTransition";
    case Regime::SemisimpleTransition: return "SemisimpleTransition";
    case Regime::HyperbolicPersistent: return "HyperbolicPersistent";
    case Regime::Indeterminate: return "Indeterminate";
  }
  return "?";
}

Classification Classification::with_regime(Regime r) {
  Classification c;
  c.regime = r;
  switch (r) {
    case Regime::Elliptic: c.ell = 0; break;
    case Regime::NonSemisimpleTransition: c.ell = 0.5; break;
    case Regime::SemisimpleTransition: c.ell = 1; break;
    default: c.ell = 0; break;
  }
  c.h = 1.0 / (1.0 + c.ell);
  c.zeta = r == Regime::NonSemisimpleTransition ? 1.0 / 3.0 : 0.0;
  return c;
}

namespace {

struct Cluster {
  cplx center;
  int size = 0;
};

// Groups eigenvalues closer than a relative threshold.
std::vector<Cluster> clusters(const std::vector<cplx>& ev, double rel) {
  double scale = 1;
  for (const cplx& z : ev) scale = std::max(scale, std::abs(z));
  const double thr = rel * scale;
  std::vector<bool> used(ev.size(), false);
  std::vector<Cluster> out;
  for (size_t i = 0; i < ev.size(); ++i) {
    if (used[i]) continue;
    Cluster c;
    cplx sum = 0;
    for (size_t j = i; j < ev.size(); ++j) {
      if (used[j] || std::abs(ev[j] - ev[i]) > thr) continue;
      used[j] = true;
      sum += ev[j];
      ++c.size;
    }
    c.center = sum / static_cast<double>(c.size);
    out.push_back(c);
  }
  return out;
}

constexpr double kPairRel = 1e-5;

// Newton on ∂_λP from a real starting value.
double refine_double_root(const Mat& A, double lambda) {
  const std::vector<double> c = charpoly_coeffs(A);
  for (int it = 0; it < 30; ++it) {
    PolyEval pe = horner(c, lambda);
    if (pe.ddp.real() == 0) break;
    const double step = pe.dp.real() / pe.ddp.real();
    lambda -= step;
    if (std::abs(step) <= 1e-15 * (1 + std::abs(lambda))) break;
  }
  return lambda;
}

bool semisimple_at(const Mat& A, double lambda, double tol) {
  const Eigen::Index n = A.rows();
  if (n < 2) return false;
  Mat M = A - lambda * Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec s = svd.singularValues();
  const double thr = tol * std::max(1.0, A.norm());
  int small = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= thr) ++small;
  return small == 2;
}

bool condition_i(const CharPolyJet& j, const Tolerances& tol) {
  return std::abs(j.Pt) <= tol.eq && std::norm(j.Ptl) < (j.Ptt * j.Pll).real() - tol.margin;
}

Vec ring_offset(int dim, double r, double angle) {
  Vec v = Vec::Zero(dim);
  v(0) = r * angle;
  return v;
}

}  // namespace

std::optional<CotangentPoint> check_ellipticity(const SystemSpec& sys, const ReferenceSolution& phi, const Vec& x,
                                                const Vec& xi, double tol) {
  const PrincipalSymbolEval A = eval_principal_symbol(sys, phi, 0.0, x, xi);
  std::optional<CotangentPoint> best;
  for (const cplx& z : spectrum(A)) {
    if (z.imag() > tol && (!best || z.imag() > best->lambda.imag())) best = CotangentPoint{x, xi, z};
  }
  return best;
}

bool check_nonsemisimple_transition(const CharPolyJet& jet, double tol) {
  return std::abs(jet.Pl) <= tol && std::abs(jet.Pll) > tol && (jet.Pll * jet.Pt).real() > tol * tol;
}

namespace {

// Strict form used by classify: the product margin is margin², and P_t must be resolved above the
// equality tolerance, which keeps it disjoint from condition (i) of the semisimple test.
bool nonsemisimple_strict(const CharPolyJet& jet, const Tolerances& tol) {
  return std::abs(jet.Pl) <= tol.eq && std::abs(jet.Pll) > tol.eq && std::abs(jet.Pt) > tol.eq &&
         (jet.Pll * jet.Pt).real() > tol.margin * tol.margin;
}

}  // namespace

Verdict check_semisimple_transition(const SystemSpec& sys, const ReferenceSolution& phi, const CotangentPoint& omega0,
                                    const Tolerances& tol, const RingOptions& ring) {
  try {
    const double lam0 = omega0.lambda.real();
    const CharPolyJet j0 = charpoly_jet(sys, phi, omega0);
    if (!condition_i(j0, tol)) return Verdict::No;
    const PrincipalSymbolEval A0 = eval_principal_symbol(sys, phi, 0.0, omega0.x, omega0.xi);
    if (!semisimple_at(A0.A, lam0, tol.eq)) return Verdict::No;
    const double xi_scale = std::max(1.0, omega0.xi.norm());
    for (int k = 0; k < ring.samples; ++k) {
      const double ang = 2 * kPi * k / ring.samples;
      const Vec x = omega0.x + ring_offset(sys.d, ring.radius, std::cos(ang));
      const Vec xi = omega0.xi + ring_offset(sys.d, ring.radius * xi_scale, std::sin(ang));
      if (xi.norm() == 0) continue;
      const PrincipalSymbolEval A = eval_principal_symbol(sys, phi, 0.0, x, xi);
      std::vector<cplx> ev = spectrum(A);
      std::sort(ev.begin(), ev.end(),
                [&](const cplx& a, const cplx& b) { return std::abs(a - lam0) < std::abs(b - lam0); });
      if (ev.size() < 2) return Verdict::Indeterminate;
      double scale = 1;
      for (const cplx& z : ev) scale = std::max(scale, std::abs(z));
      if (std::abs(ev[0] - ev[1]) > kPairRel * scale) continue;  // not on Γ
      const double lam = refine_double_root(A.A, 0.5 * (ev[0] + ev[1]).real());
      const CharPolyJet j = charpoly_jet(sys, phi, CotangentPoint{x, xi, lam});
      if (!condition_i(j, tol) || !semisimple_at(A.A, lam, tol.eq)) return Verdict::No;
    }
    return Verdict::Yes;
  } catch (const NumericalError&) {
    return Verdict::Indeterminate;
  }
}

namespace {

// Real-persistence test at a coalescent point; falls back to sampled spectra.
bool persists(const SystemSpec& sys, const ReferenceSolution& phi, const CharPolyJet& j, const Tolerances& tol) {
  const double prod = (j.Pll * j.Pt).real();
  if (std::abs(j.Pt) > tol.eq && prod < -tol.margin * tol.margin) return true;
  if (std::abs(j.Pt) <= tol.eq && std::norm(j.Ptl) - (j.Ptt * j.Pll).real() > tol.margin) return true;
  for (double t : {1e-3, 1e-2}) {
    const PrincipalSymbolEval A = eval_principal_symbol(sys, phi, t, j.omega.x, j.omega.xi);
    for (const cplx& z : spectrum(A))
      if (std::abs(z.imag()) > tol.margin) return false;
  }
  return true;
}

}  // namespace

Classification classify(const SystemSpec& sys, const ReferenceSolution& phi, const SearchRegion& region,
                        const Tolerances& tol) {
  // Ellipticity over the whole grid first.
  std::optional<CotangentPoint> best;
  for (const Vec& x : region.xs)
    for (const Vec& xi : region.xis) {
      auto w = check_ellipticity(sys, phi, x, xi, tol.margin);
      if (w && (!best || w->lambda.imag() > best->lambda.imag())) best = w;
    }
  if (best) {
    Classification c = Classification::with_regime(Regime::Elliptic);
    c.witness = *best;
    c.has_witness = true;
    c.tol = tol;
    c.jet = charpoly_jet(sys, phi, *best);
    return c;
  }

  struct Candidate {
    CotangentPoint omega;
    CharPolyJet jet;
  };
  std::vector<Candidate> coalescent;
  bool higher_multiplicity = false;
  bool failure = false;
  std::string failure_note;
  for (const Vec& x : region.xs)
    for (const Vec& xi : region.xis) {
      try {
        const PrincipalSymbolEval A = eval_principal_symbol(sys, phi, 0.0, x, xi);
        for (const Cluster& cl : clusters(spectrum(A), kPairRel)) {
          if (cl.size == 1) continue;
          if (cl.size > 2) {
            higher_multiplicity = true;
            continue;
          }
          const double lam = refine_double_root(A.A, cl.center.real());
          CotangentPoint om{x, xi, lam};
          CharPolyJet j = charpoly_jet(sys, phi, om);
          if (std::abs(j.P) > tol.eq) continue;
          coalescent.push_back({om, j});
        }
      } catch (const NumericalError& e) {
        failure = true;
        failure_note = e.what();
      }
    }

  for (const Candidate& cand : coalescent) {
    if (nonsemisimple_strict(cand.jet, tol)) {
      Classification c = Classification::with_regime(Regime::NonSemisimpleTransition);
      c.witness = cand.omega;
      c.has_witness = true;
      c.jet = cand.jet;
      c.tol = tol;
      return c;
    }
  }
  bool ring_failure = false;
  for (const Candidate& cand : coalescent) {
    if (std::abs(cand.jet.Pl) > tol.eq || std::abs(cand.jet.Pll) <= tol.eq) continue;
    const Verdict v = check_semisimple_transition(sys, phi, cand.omega, tol);
    if (v == Verdict::Yes) {
      Classification c = Classification::with_regime(Regime::SemisimpleTransition);
      c.witness = cand.omega;
      c.has_witness = true;
      c.jet = cand.jet;
      c.tol = tol;
      return c;
    }
    if (v == Verdict::Indeterminate) ring_failure = true;
  }

  Classification out = Classification::with_regime(Regime::HyperbolicPersistent);
  out.tol = tol;
  if (failure) {
    out = Classification::with_regime(Regime::Indeterminate);
    out.note = "spectrum failure: " + failure_note;
    out.tol = tol;
    return out;
  }
  if (higher_multiplicity) {
    out = Classification::with_regime(Regime::Indeterminate);
    out.note = "eigenvalue of multiplicity above two";
    out.tol = tol;
    return out;
  }
  if (ring_failure) {
    out = Classification::with_regime(Regime::Indeterminate);
    out.note = "root tracking on the sample ring failed";
    out.tol = tol;
    return out;
  }
  for (const Candidate& cand : coalescent) {
    bool ok = false;
    try {
      ok = persists(sys, phi, cand.jet, tol);
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      out = Classification::with_regime(Regime::Indeterminate);
      out.witness = cand.omega;
      out.has_witness = true;
      out.jet = cand.jet;
      out.tol = tol;
      out.note = "coalescent point with undecided transition";
      return out;
    }
  }
  if (!coalescent.empty()) {
    out.witness = coalescent.front().omega;
    out.jet = coalescent.front().jet;
    out.has_witness = true;
    out.note = "coalescent points keep a real spectrum";
  }
  return out;
}

DiscriminantReport discriminant_jet_crosscheck(const std::function<Mat(double t)>& block, const JetSteps& steps) {
  auto delta = [&](double t) {
    const Mat B = block(t);
    if (B.rows() != 2 || B.cols() != 2) throw DomainError("discriminant check needs a 2x2 block");
    const double tr = B.trace();
    return tr * tr - 4 * B.determinant();
  };
  const double h = steps.time_step;
  auto d1 = [&](double s) { return (delta(s) - delta(-s)) / (2 * s); };
  auto d2 = [&](double s) { return (delta(s) - 2 * delta(0) + delta(-s)) / (s * s); };
  DiscriminantReport r;
  r.dDelta = (4 * d1(h / 2) - d1(h)) / 3;
  r.ddDelta = (4 * d2(h / 2) - d2(h)) / 3;
  const double lam = 0.5 * block(0).trace();
  const CharPolyJet j = charpoly_jet_family(block, lam, 0.0, steps);
  r.minus4Pt = -4 * j.Pt.real();
  r.rhs2 = 2 * std::norm(j.Ptl) - 2 * (j.Pll * j.Ptt).real();
  r.residual1 = std::abs(r.dDelta - r.minus4Pt) / std::max(1.0, std::abs(r.dDelta));
  r.residual2 = std::abs(r.ddDelta - r.rhs2) / std::max(1.0, std::abs(r.ddDelta));
  return r;
}

std::vector<TransitionPoint> find_transition_point_curve(const std::function<Mat(double t, double x)>& family,
                                                         const std::vector<double>& xs, double tol) {
  std::vector<TransitionPoint> out;
  for (double x : xs) {
    auto delta = [&](double t) {
      const Mat B = family(t, x);
      const double tr = B.trace();
      return tr * tr - 4 * B.determinant();
    };
    const double fd = 1e-5;
    const bool deflate = std::abs(delta(0)) <= tol;
    // With Δ(0) = 0 the root t = 0 is trivial; iterate on Δ(t)/t, whose value at 0 is Δ'(0).
    auto g = [&](double t) {
      if (!deflate) return delta(t);
      if (std::abs(t) < fd) return (delta(fd) - delta(-fd)) / (2 * fd) + t * (delta(fd) - 2 * delta(0) + delta(-fd)) / (fd * fd) / 2;
      return delta(t) / t;
    };
    TransitionPoint p;
    p.x = x;
    double t = 0;
    for (int it = 0; it < 60; ++it) {
      const double gv = g(t);
      const double s = 1e-6 * (1 + std::abs(t));
      const double dg = (g(t + s) - g(t - s)) / (2 * s);
      p.iterations = it + 1;
      if (std::abs(gv) <= tol) {
        p.ok = true;
        break;
      }
      if (dg == 0 || !std::isfinite(dg)) break;
      const double step = gv / dg;
      t -= step;
      if (!std::isfinite(t) || std::abs(t) > 1e6) break;
      if (std::abs(step) <= 1e-15 * (1 + std::abs(t))) {
        p.ok = std::abs(g(t)) <= 1e3 * tol + 1e-12;
        break;
      }
    }
    p.s = t;
    out.push_back(p);
  }
  return out;
}

}  // namespace hypflow
