#pragma once

#include <string>
#include <vector>

#include "hypflow/types.hpp"

namespace hypflow {

enum class AiryMethod { Series, Asymptotic, ODEContinuation };
std::string to_string(AiryMethod m);

struct AiryValue {
  cplx z;
  cplx ai, aip;
  AiryMethod method = AiryMethod::Series;
};

inline const cplx kJ = std::polar(1.0, 2.0 * kPi / 3.0);
// Ai(jτ)Ai'(τ) − jAi'(jτ)Ai(τ) for all τ.
inline const cplx kAiryWronskian = cplx(-std::sqrt(3.0), 1.0) / (4.0 * kPi);

inline constexpr double kAirySeriesRadius = 9.0;
inline constexpr double kAiryMaxRadius = 40.0;

AiryValue airy_ai(cplx z);
cplx wronskian(double tau);

// Fundamental matrix of Z' + [[0,1],[t,0]] Z = 0 with Z(τ;τ) = I.
Eigen::Matrix2cd vector_airy(double tau, double t);
// Same matrix by RK4 on the ODE (oracle).
Eigen::Matrix2cd vector_airy_ode(double tau, double t, int steps = 4000);

double airy_envelope(double tau, double t);

struct AiryBoundsReport {
  double C_upper = 0;  // smallest C with |Z(τ;t)| ≤ C(1+|τ|)^{1/4}(1+|t|)^{1/4} e_Ai(τ;t)
  double c_lower = 0;  // largest c with |Z(0;t)(0,1)^T| ≥ c e_Ai(0;t)
  double C_oscillatory = 0;  // max |Ai(−t)| t^{1/4} on the negative side
  bool upper_ok = false, lower_ok = false;
};
AiryBoundsReport verify_airy_bounds(const std::vector<double>& t_grid);

// S_(0)(τ;t) of the unperturbed ℓ=1/2 block by the closed form D^{-1} Z(Θ(τ);Θ(t)) D.
Eigen::Matrix2cd airy_block_closed_form(double eps, double f0, double tstar, double tau, double t);
// Max entry-wise relative deviation between the integrated flow and the closed form.
double conjugated_flow_compare(double eps, double f0, double tstar, double tau, double t);

}  // namespace hypflow
