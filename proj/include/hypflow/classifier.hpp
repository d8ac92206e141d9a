#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypflow/system_model.hpp"

namespace hypflow {

enum class Regime { Elliptic, NonSemisimpleTransition, SemisimpleTransition, HyperbolicPersistent, Indeterminate };
std::string to_string(Regime r);

struct Tolerances {
  double eq = 1e-8;      // equality tests
  double margin = 1e-6;  // strict-inequality margins
};

struct Classification {
  Regime regime = Regime::Indeterminate;
  double ell = 0, h = 1, zeta = 0;
  CotangentPoint witness;
  CharPolyJet jet;
  Tolerances tol;
  std::string note;
  bool has_witness = false;

  static Classification with_regime(Regime r);
};

struct SearchRegion {
  std::vector<Vec> xs;
  std::vector<Vec> xis;
};

std::optional<CotangentPoint> check_ellipticity(const SystemSpec& sys, const ReferenceSolution& phi, const Vec& x,
                                                const Vec& xi, double tol);

bool check_nonsemisimple_transition(const CharPolyJet& jet, double tol);

enum class Verdict { Yes, No, Indeterminate };

struct RingOptions {
  int samples = 8;
  double radius = 1e-2;
};

Verdict check_semisimple_transition(const SystemSpec& sys, const ReferenceSolution& phi, const CotangentPoint& omega0,
                                    const Tolerances& tol, const RingOptions& ring = {});

Classification classify(const SystemSpec& sys, const ReferenceSolution& phi, const SearchRegion& region,
                        const Tolerances& tol = {});

struct DiscriminantReport {
  double dDelta = 0, ddDelta = 0;        // ∂_tΔ(0), ∂²_tΔ(0) from trace/determinant samples
  double minus4Pt = 0, rhs2 = 0;         // −4∂_tP₀, 2(∂_t∂_λP₀)² − 2∂²_λP₀∂²_tP₀
  double residual1 = 0, residual2 = 0;   // relative residuals
};
// Block family t ↦ B(t) (2×2); identities checked at t = 0 with λ = tr B(0)/2.
DiscriminantReport discriminant_jet_crosscheck(const std::function<Mat(double t)>& block, const JetSteps& steps = {});

struct TransitionPoint {
  double x = 0, s = 0;
  bool ok = false;
  int iterations = 0;
};
// Family (t, x) ↦ 2×2 symbol; Newton on the discriminant in t starting from 0.
std::vector<TransitionPoint> find_transition_point_curve(const std::function<Mat(double t, double x)>& family,
                                                         const std::vector<double>& xs, double tol = 1e-12);

}  // namespace hypflow
