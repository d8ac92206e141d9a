#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypflow/example_systems.hpp"
#include "hypflow/system_model.hpp"

using namespace hypflow;

namespace {

ReferenceSolution stationary(std::function<Vec(const Vec&)> f) {
  ReferenceSolution r;
  r.initial = std::move(f);
  r.domain.periodic = true;
  return r;
}

}  // namespace

TEST_CASE("finite-difference u-derivatives match closed forms") {
  const SystemSpec closed = burgers1d(1.3, 0.7);
  SystemSpec fd = closed;
  fd.flux_du = nullptr;
  fd.source_du = nullptr;
  const Vec x = vec1(0.2), u = vec2(0.4, -1.1);
  for (int k = 0; k < 2; ++k) CHECK((fd.dA(0, k, 0, x, u) - closed.dA(0, k, 0, x, u)).norm() <= 1e-8);
  CHECK((fd.dF(0, x, u) - closed.dF(0, x, u)).norm() <= 1e-10);
}

TEST_CASE("shape checks reject malformed fluxes") {
  SystemSpec s;
  s.N = 2;
  s.flux = [](int, double, const Vec&, const Vec&) { return Mat(Mat::Zero(3, 3)); };
  CHECK_THROWS_AS(s.A(0, 0, vec1(0), vec2(0, 0)), DomainError);
  CHECK(s.F(0, vec1(0), vec2(0, 0)).norm() == 0);
}

TEST_CASE("time derivative of the reference solution from the PDE") {
  const SystemSpec sys = burgers1d(1.0, 0.8);
  const ReferenceSolution phi = stationary([](const Vec& x) { return vec2(0.5 + 0.2 * std::cos(x(0)), 0.0); });
  const double x = 1.0, u1 = 0.5 + 0.2 * std::cos(x);
  // ∂_tφ = F − A∂_xφ with A = diag(u1, u1) when u2 = 0
  const Vec dt = phi.dt_from_pde(sys, vec1(x));
  CHECK(dt(0) == doctest::Approx(u1 * 0.2 * std::sin(x)).epsilon(1e-9));
  CHECK(dt(1) == doctest::Approx(0.8).epsilon(1e-12));
  // φ(t) ≈ φ₀ + tφ_t + ½t²φ_tt
  const Vec a = phi.at(sys, 1e-3, vec1(x));
  CHECK(a(1) == doctest::Approx(0.8e-3).epsilon(1e-6));
}

TEST_CASE("closed-form evolution takes precedence") {
  const SystemSpec sys = burgers1d(1.0, 1.0);
  ReferenceSolution phi = stationary([](const Vec&) { return vec2(0, 0); });
  phi.evolved = [](double t, const Vec&) { return vec2(0, t); };
  CHECK(phi.at(sys, 0.25, vec1(0))(1) == 0.25);
}

TEST_CASE("principal symbol is linear in xi") {
  const SystemSpec sys = burgers2d([](const Vec&) { return 1.5; }, [](const Vec&) { return vec2(0, 1); });
  const ReferenceSolution phi = stationary([](const Vec& x) { return vec2(std::sin(x(0)), std::cos(x(1))); });
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N01;
  for (int k = 0; k < 100; ++k) {
    const Vec x = vec2(N01(rng), N01(rng));
    const Vec a = vec2(N01(rng), N01(rng)), b = vec2(N01(rng), N01(rng));
    const double s = N01(rng);
    const Mat Aab = eval_principal_symbol(sys, phi, 0, x, a + s * b).A;
    const Mat lin = eval_principal_symbol(sys, phi, 0, x, a).A + s * eval_principal_symbol(sys, phi, 0, x, b).A;
    CHECK((Aab - lin).norm() <= 1e-12 * (1 + lin.norm()));
  }
  CHECK_THROWS_AS(eval_principal_symbol(sys, phi, 0, vec2(0, 0), vec2(0, 0)), DomainError);
}

TEST_CASE("spectrum is positively homogeneous of degree one in xi") {
  const SystemSpec sys = van_der_waals();
  const ReferenceSolution phi = stationary([](const Vec& x) { return vec2(0.5 + 0.1 * std::sin(x(0)), 0.0); });
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.1, 10);
  for (int k = 0; k < 100; ++k) {
    const double s = U(rng), x = U(rng);
    const auto a = spectrum(eval_principal_symbol(sys, phi, 0, vec1(x), vec1(1.0)));
    const auto b = spectrum(eval_principal_symbol(sys, phi, 0, vec1(x), vec1(s)));
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] - s * a[i]) <= 1e-10 * s);
  }
}

TEST_CASE("characteristic polynomial and hyperbolicity") {
  Mat A(2, 2);
  A << 1, -4, 1, 1;  // eigenvalues 1 ± 2i
  const auto c = charpoly_coeffs(A);
  CHECK(c[1] == doctest::Approx(-2));
  CHECK(c[2] == doctest::Approx(5));
  CHECK(std::abs(eval_charpoly(A, cplx(1, 2))) <= 1e-12);
  CHECK_FALSE(hyperbolicity_test(A, 1e-8));
  Mat B(2, 2);
  B << 1, 4, 1, 1;
  CHECK(hyperbolicity_test(B, 1e-8));
  const auto sp = spectrum(A);
  CHECK(std::abs(sp[0] - cplx(1, -2)) <= 1e-12);
  CHECK(std::abs(sp[1] - cplx(1, 2)) <= 1e-12);
}

TEST_CASE("jet of the homogeneous Burgers state: P = lambda^2 + t^2") {
  const SystemSpec sys = burgers1d(1.0, 1.0);
  ReferenceSolution phi = stationary([](const Vec&) { return vec2(0, 0); });
  phi.evolved = [](double t, const Vec&) { return vec2(0, t); };
  const CharPolyJet J = charpoly_jet(sys, phi, {vec1(0), vec1(1), 0});
  CHECK(std::abs(J.P) <= 1e-14);
  CHECK(std::abs(J.Pl) <= 1e-14);
  CHECK(std::abs(J.Pll - 2.0) <= 1e-12);
  CHECK(std::abs(J.Pt) <= 1e-10);
  CHECK(std::abs(J.Ptt - 2.0) <= 1e-6);
  CHECK(std::abs(J.Ptl) <= 1e-10);
}

TEST_CASE("jet of the model block [[0,1],[-t,0]]: P = lambda^2 + t") {
  const CharPolyJet J = charpoly_jet_family(
      [](double t) {
        Mat A(2, 2);
        A << 0, 1, -t, 0;
        return A;
      },
      0.0);
  CHECK(std::abs(J.Pt - 1.0) <= 1e-10);
  CHECK(std::abs(J.Pll - 2.0) <= 1e-12);
  CHECK(std::abs(J.Ptt) <= 1e-6);
  CHECK_FALSE(J.noise_warning);
}

TEST_CASE("KGZ jet: P_t * P_lambda_lambda at the witness equals 4 alpha c (1 + c^2 + alpha^2)") {
  // Exact symbolic differentiation of det(lambda I - A) for the KGZ symbol gives
  // P_lambda_lambda = -2(1 + c^2 + alpha^2) and P_t = -2 alpha c d_x u at the witness.
  for (auto [alpha, c] : {std::pair{1.0, 0.5}, {0.7, -0.3}, {2.0, 0.25}}) {
    CAPTURE(alpha);
    CAPTURE(c);
    const auto& e = find_example("kgz");
    const ParamMap p = merge_params(e, {{"alpha", alpha}, {"c", c}});
    const SystemSpec sys = e.factory(p);
    const ReferenceState st = e.state("witness", p);
    const CharPolyJet J = charpoly_jet(sys, st.phi, {vec1(0), vec1(1), 0});
    const double sg = alpha * c > 0 ? 1.0 : -1.0;  // d_x u(0, 0)
    const double want = 4 * alpha * c * sg * (1 + c * c + alpha * alpha);
    CHECK(std::abs(J.P) <= 1e-12);
    CHECK((J.Pt * J.Pll).real() == doctest::Approx(want).epsilon(1e-6));
  }
}
