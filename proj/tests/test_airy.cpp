#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypflow/airy.hpp"

using namespace hypflow;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// Reference values from 30-digit mpmath evaluations.
struct Ref {
  double t, ai, aip;
};
const Ref kRefs[] = {
    {0, 0.355028053887817239, -0.258819403792806798},
    {1, 0.135292416312881416, -0.159147441296793213},
    {-1, 0.535560883292352119, -0.0101605671166452094},
    {5, 1.08344428136074417e-4, -2.47413890868462476e-4},
    {-5, 0.350761009024114320, 0.327192818554443137},
    {8.9, 3.34206104251869991e-9, -1.00621099218369121e-8},
    {9.1, 1.82422825356402804e-9, -5.55203734438591944e-9},
    {10, 1.10475325528986859e-10, -3.52063367673892364e-10},
    {-10, 0.0402412384864431907, 0.996265044132790056},
    {20, 1.69167286867054031e-27, -7.58639162574835496e-27},
    {-30, -0.0879681884568421628, 1.22862060263748513},
};

}  // namespace

TEST_CASE("Ai and Ai' match high-precision references on both sides of the switchover") {
  for (const Ref& r : kRefs) {
    CAPTURE(r.t);
    const AiryValue v = airy_ai(r.t);
    CHECK(std::abs(v.ai.imag()) <= 1e-14 * (1 + std::abs(v.ai.real())));
    CHECK(rel(v.ai, r.ai) <= 1e-12);
    CHECK(rel(v.aip, r.aip) <= 1e-12);
  }
}

TEST_CASE("complex argument on the j ray") {
  const AiryValue v = airy_ai(kJ * 5.0);
  CHECK(rel(v.ai, cplx(284.832337415871947, -164.447964128279233)) <= 1e-12);
}

TEST_CASE("method selection follows the radius") {
  CHECK(airy_ai(8.0).method == AiryMethod::Series);
  CHECK(airy_ai(-8.0).method == AiryMethod::Series);
  CHECK(airy_ai(12.0).method == AiryMethod::Asymptotic);
  CHECK(airy_ai(cplx(0, 20)).method == AiryMethod::Asymptotic);
}

TEST_CASE("Wronskian constant for all tau") {
  for (double tau : {-25.0, -10.0, -5.0, -1.0, 0.0, 0.5, 3.0, 5.0, 10.0, 25.0}) {
    CAPTURE(tau);
    CHECK(rel(wronskian(tau), kAiryWronskian) <= 1e-10);
  }
  CHECK(std::abs(kAiryWronskian - cplx(-std::sqrt(3.0), 1) / (4 * kPi)) == 0);
}

TEST_CASE("Airy equation holds by second differences across the switch") {
  const double h = 1e-3;
  for (double t : {-9.0, -3.0, 0.7, 8.99, 9.01, 15.0}) {
    CAPTURE(t);
    const cplx a0 = airy_ai(t).ai, ap = airy_ai(t + h).ai, am = airy_ai(t - h).ai;
    const cplx dd = (ap - 2.0 * a0 + am) / (h * h);
    const double scale = std::abs(t * a0) + std::abs(airy_ai(t).aip) + 1e-300;
    CHECK(std::abs(dd - t * a0) / scale <= 1e-5);
  }
}

TEST_CASE("vector Airy matrix is the fundamental solution") {
  CHECK((vector_airy(1.3, 1.3) - Eigen::Matrix2cd::Identity()).norm() <= 1e-12);
  for (auto [tau, t] : {std::pair{0.0, 4.0}, {-3.0, 2.0}, {2.0, -1.0}, {-5.0, -2.0}}) {
    CAPTURE(tau);
    CAPTURE(t);
    const Eigen::Matrix2cd Z = vector_airy(tau, t), Zo = vector_airy_ode(tau, t);
    CHECK((Z - Zo).norm() / Zo.norm() <= 1e-8);
    CHECK(std::abs(Z.determinant() - 1.0) <= 1e-9);  // trace-free generator
  }
}

TEST_CASE("flow property Z(t';t)Z(tau;t') = Z(tau;t) on random triples") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-6, 6);
  for (int k = 0; k < 100; ++k) {
    const double a = U(rng), b = U(rng), c = U(rng);
    const Eigen::Matrix2cd lhs = vector_airy(b, c) * vector_airy(a, b), rhs = vector_airy(a, c);
    CHECK((lhs - rhs).norm() <= 1e-8 * (1 + rhs.norm()) * (1 + vector_airy(a, b).norm()));
  }
}

TEST_CASE("Airy bound constants are finite and positive") {
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.5 * i);
  const AiryBoundsReport r = verify_airy_bounds(grid);
  CHECK(r.upper_ok);
  CHECK(r.lower_ok);
  CHECK(r.C_upper > 0);
  CHECK(r.C_upper < 10);
  CHECK(r.c_lower > 0);
  CHECK(r.C_oscillatory > 0);
  CHECK(r.C_oscillatory < 1 / std::sqrt(kPi) * 1.01);
}

TEST_CASE("model block closed form agrees with the integrated flow") {
  CHECK(conjugated_flow_compare(1e-4, 1.0, 0.0, 0.0, 4.0) <= 1e-6);
  CHECK(conjugated_flow_compare(1e-3, 2.0, 0.5, 0.0, 3.0) <= 1e-6);
}

TEST_CASE("method names") {
  CHECK(to_string(AiryMethod::Series) == "series");
  CHECK(to_string(AiryMethod::Asymptotic) == "asymptotic");
}
