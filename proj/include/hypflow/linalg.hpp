#pragma once

#include <vector>

#include "hypflow/types.hpp"

namespace hypflow {

// Monic characteristic coefficients c[0..N] with det(λI − A) = Σ c[k] λ^{N−k}, c[0] = 1.
std::vector<double> faddeev_leverrier(const Mat& A);
std::vector<cplx> faddeev_leverrier(const CMat& A);

// p(z), p'(z), p''(z) for coefficients in descending powers.
struct PolyEval {
  cplx p, dp, ddp;
};
PolyEval horner(const std::vector<cplx>& c, cplx z);
PolyEval horner(const std::vector<double>& c, cplx z);

// Aberth–Ehrlich simultaneous iteration; throws NumericalError on failure.
std::vector<cplx> aberth_roots(const std::vector<cplx>& c, int max_iter = 500, double tol = 1e-14);
// Companion-matrix QR eigenvalues.
std::vector<cplx> companion_roots(const std::vector<cplx>& c);

// Sort lexicographically by (real, imag).
void sort_lex(std::vector<cplx>& z);

// Complex Schur form A = U T U^H with the eigenvalues flagged by `first`
// moved to the leading block. Returns number of selected eigenvalues.
struct OrderedSchur {
  CMat U, T;
  int k = 0;
};
OrderedSchur ordered_schur(const CMat& A, const std::vector<bool>& first_by_index);
// Selects eigenvalues by predicate on the diagonal entry after an initial Schur.
template <class Pred>
OrderedSchur ordered_schur_by(const CMat& A, Pred pred);

// Solves A X − X B = C for small dense matrices via the Kronecker form.
CMat solve_sylvester(const CMat& A, const CMat& B, const CMat& C);

// Spectral norm of a complex matrix.
double norm2(const CMat& A);

// Least-squares slope and intercept of y against x.
struct LineFit {
  double slope = 0, intercept = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hypflow

#include "hypflow/linalg_impl.hpp"
