#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hypflow/linalg.hpp"

using namespace hypflow;

TEST_CASE("Faddeev-LeVerrier matches trace, principal minors and determinant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N01;
  for (int k = 0; k < 100; ++k) {
    Mat A(3, 3);
    for (int i = 0; i < 9; ++i) A(i) = N01(rng);
    const double tr = A.trace();
    const double m2 = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) + A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0) +
                      A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    const auto c = faddeev_leverrier(A);
    REQUIRE(c.size() == 4);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == doctest::Approx(-tr).epsilon(1e-12));
    CHECK(c[2] == doctest::Approx(m2).epsilon(1e-10).scale(1 + std::abs(m2)));
    CHECK(c[3] == doctest::Approx(-A.determinant()).epsilon(1e-10).scale(1 + std::abs(A.determinant())));
  }
}

TEST_CASE("Horner returns value and first two derivatives") {
  // p(z) = 2z^3 - z + 5: p' = 6z^2 - 1, p'' = 12z
  const std::vector<double> c = {2, 0, -1, 5};
  for (cplx z : {cplx(0, 0), cplx(1.5, 0), cplx(-0.3, 2)}) {
    const PolyEval e = horner(c, z);
    CHECK(std::abs(e.p - (2.0 * z * z * z - z + 5.0)) <= 1e-13);
    CHECK(std::abs(e.dp - (6.0 * z * z - 1.0)) <= 1e-13);
    CHECK(std::abs(e.ddp - 12.0 * z) <= 1e-13);
  }
}

TEST_CASE("Aberth and companion roots agree with known roots") {
  // (z-1)(z+2)(z-3i)(z+3i) = (z^2 + z - 2)(z^2 + 9)
  const std::vector<cplx> c = {1, 1, 7, 9, -18};
  std::vector<cplx> want = {cplx(-2, 0), cplx(0, -3), cplx(0, 3), cplx(1, 0)};
  auto a = aberth_roots(c);
  auto q = companion_roots(c);
  sort_lex(a);
  sort_lex(q);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(a[i] - want[i]) <= 1e-12);
    CHECK(std::abs(q[i] - want[i]) <= 1e-10);
  }
}

TEST_CASE("conjugate-pair spectra of random real polynomials") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N01;
  for (int k = 0; k < 100; ++k) {
    std::vector<cplx> c = {1};
    for (int i = 0; i < 5; ++i) c.push_back(N01(rng));
    const auto r = aberth_roots(c);
    for (const cplx& z : r) {
      double best = 1e300;
      for (const cplx& w : r) best = std::min(best, std::abs(w - std::conj(z)));
      CHECK(best <= 1e-8 * (1 + std::abs(z)));
    }
  }
}

TEST_CASE("sort_lex orders by real then imaginary part") {
  std::vector<cplx> z = {cplx(1, 0), cplx(0, 1), cplx(0, -1), cplx(-1, 5)};
  sort_lex(z);
  CHECK(z[0] == cplx(-1, 5));
  CHECK(z[1] == cplx(0, -1));
  CHECK(z[2] == cplx(0, 1));
  CHECK(z[3] == cplx(1, 0));
}

TEST_CASE("ordered Schur puts selected eigenvalues first") {
  CMat A(3, 3);
  A << 1, 2, 0, 0, cplx(0, 1), 1, 0, 0, -2;
  const OrderedSchur s = ordered_schur_by(A, [](const cplx& z) { return z.imag() > 0.5; });
  CHECK(s.k == 1);
  CHECK(std::abs(s.T(0, 0) - cplx(0, 1)) <= 1e-12);
  CHECK((s.U * s.T * s.U.adjoint() - A).norm() <= 1e-12);
  CHECK((s.U.adjoint() * s.U - CMat::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("Sylvester solve") {
  CMat A(2, 2), B(2, 2), C(2, 2);
  A << 3, 1, 0, 2;
  B << cplx(0, 1), 0, 1, -1;
  C << 1, 2, 3, 4;
  const CMat X = solve_sylvester(A, B, C);
  CHECK((A * X - X * B - C).norm() <= 1e-12);
}

TEST_CASE("spectral norm and line fit") {
  CMat A = CMat::Zero(2, 2);
  A(0, 1) = 3;
  A(1, 0) = cplx(0, 4);
  CHECK(norm2(A) == doctest::Approx(4).epsilon(1e-14));
  const LineFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  CHECK(f.slope == doctest::Approx(2));
  CHECK(f.intercept == doctest::Approx(1));
}
