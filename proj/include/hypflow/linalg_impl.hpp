#pragma once

#include <Eigen/Eigenvalues>

namespace hypflow {

OrderedSchur schur_reorder(CMat U, CMat T, std::vector<bool> select);

template <class Pred>
OrderedSchur ordered_schur_by(const CMat& A, Pred pred) {
  Eigen::ComplexSchur<CMat> cs(A);
  CMat U = cs.matrixU();
  CMat T = cs.matrixT();
  std::vector<bool> sel(static_cast<size_t>(A.rows()));
  for (Eigen::Index i = 0; i < A.rows(); ++i) sel[static_cast<size_t>(i)] = pred(T(i, i));
  return schur_reorder(std::move(U), std::move(T), std::move(sel));
}

}  // namespace hypflow
