#include "hypflow/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

namespace hypflow {

namespace {

template <class M, class S>
std::vector<S> faddeev_impl(const M& A) {
  const Eigen::Index n = A.rows();
  std::vector<S> c(static_cast<size_t>(n) + 1);
  c[0] = S(1);
  M Mk = M::Zero(n, n);
  M I = M::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    Mk = A * Mk + c[static_cast<size_t>(k - 1)] * I;
    c[static_cast<size_t>(k)] = -(A * Mk).trace() / S(static_cast<double>(k));
  }
  return c;
}

}  // namespace

std::vector<double> faddeev_leverrier(const Mat& A) { return faddeev_impl<Mat, double>(A); }
std::vector<cplx> faddeev_leverrier(const CMat& A) { return faddeev_impl<CMat, cplx>(A); }

PolyEval horner(const std::vector<cplx>& c, cplx z) {
  cplx p = 0, dp = 0, ddp = 0;
  for (const cplx& a : c) {
    ddp = ddp * z + 2.0 * dp;
    dp = dp * z + p;
    p = p * z + a;
  }
  return {p, dp, ddp};
}

PolyEval horner(const std::vector<double>& c, cplx z) {
  std::vector<cplx> cc(c.begin(), c.end());
  return horner(cc, z);
}

void sort_lex(std::vector<cplx>& z) {
  std::sort(z.begin(), z.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<cplx> companion_roots(const std::vector<cplx>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return {};
  CMat C = CMat::Zero(n, n);
  for (int j = 0; j < n; ++j) C(0, j) = -c[static_cast<size_t>(j) + 1] / c[0];
  for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMat> es(C, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion QR failed");
  std::vector<cplx> r(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return r;
}

std::vector<cplx> aberth_roots(const std::vector<cplx>& c, int max_iter, double tol) {
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {-c[1] / c[0]};
  // Initial guesses on a circle of radius from the Cauchy bound, slightly rotated.
  double rad = 0;
  for (int k = 1; k <= n; ++k) rad = std::max(rad, std::pow(std::abs(c[static_cast<size_t>(k)] / c[0]), 1.0 / k));
  rad = std::max(rad, 1e-3);
  std::vector<cplx> z(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k)
    z[static_cast<size_t>(k)] = rad * std::polar(1.0, 2 * kPi * k / n + 0.4);
  std::vector<double> absc(c.size());
  for (size_t k = 0; k < c.size(); ++k) absc[k] = std::abs(c[k]);

  std::vector<bool> done(static_cast<size_t>(n), false);
  for (int it = 0; it < max_iter; ++it) {
    bool all = true;
    for (int i = 0; i < n; ++i) {
      const size_t si = static_cast<size_t>(i);
      if (done[si]) continue;
      PolyEval pe = horner(c, z[si]);
      // Backward-error stopping test: |p(z)| against Σ|c_k||z|^k.
      double scale = 0;
      const double az = std::abs(z[si]);
      for (double a : absc) scale = scale * az + a;
      if (std::abs(pe.p) <= tol * scale) {
        done[si] = true;
        continue;
      }
      all = false;
      cplx ratio = pe.p / pe.dp;
      cplx sum = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[si] - z[static_cast<size_t>(j)]);
      cplx w = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) throw NumericalError("Aberth iteration produced non-finite step");
      z[si] -= w;
      if (std::abs(w) <= 1e-16 * std::max(1.0, std::abs(z[si]))) done[si] = true;
    }
    if (all) return z;
  }
  double worst = 0;
  for (const cplx& zi : z) worst = std::max(worst, std::abs(horner(c, zi).p));
  throw NumericalError("Aberth iteration did not converge; max residual " + std::to_string(worst));
}

OrderedSchur schur_reorder(CMat U, CMat T, std::vector<bool> sel) {
  const Eigen::Index n = T.rows();
  // Bubble selected diagonal entries upwards with unitary Givens swaps.
  int placed = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!sel[static_cast<size_t>(i)]) continue;
    for (Eigen::Index k = i - 1; k >= placed; --k) {
      cplx t11 = T(k, k), t12 = T(k, k + 1), t22 = T(k + 1, k + 1);
      // x is an eigenvector of the 2×2 block for t22.
      cplx x0 = t12, x1 = t22 - t11;
      double nx = std::sqrt(std::norm(x0) + std::norm(x1));
      if (nx == 0) {
        std::swap(sel[static_cast<size_t>(k)], sel[static_cast<size_t>(k + 1)]);
        continue;
      }
      x0 /= nx;
      x1 /= nx;
      Eigen::Matrix2cd G;
      G << x0, -std::conj(x1), x1, std::conj(x0);
      T.middleCols(k, 2) = T.middleCols(k, 2) * G;
      T.middleRows(k, 2) = G.adjoint() * T.middleRows(k, 2);
      U.middleCols(k, 2) = U.middleCols(k, 2) * G;
      T(k + 1, k) = 0;
      std::swap(sel[static_cast<size_t>(k)], sel[static_cast<size_t>(k + 1)]);
    }
    ++placed;
  }
  return {std::move(U), std::move(T), placed};
}

OrderedSchur ordered_schur(const CMat& A, const std::vector<bool>& first_by_index) {
  Eigen::ComplexSchur<CMat> cs(A);
  return schur_reorder(cs.matrixU(), cs.matrixT(), first_by_index);
}

CMat solve_sylvester(const CMat& A, const CMat& B, const CMat& C) {
  const Eigen::Index m = A.rows(), n = B.rows();
  CMat Im = CMat::Identity(m, m), In = CMat::Identity(n, n);
  CMat K = Eigen::kroneckerProduct(In, A) - Eigen::kroneckerProduct(B.transpose(), Im);
  CVec rhs = Eigen::Map<const CVec>(C.data(), m * n);
  CVec x = K.fullPivLu().solve(rhs);
  return Eigen::Map<CMat>(x.data(), m, n);
}

double norm2(const CMat& A) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(A);
  return svd.singularValues()(0);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace hypflow
