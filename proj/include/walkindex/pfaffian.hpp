#pragma once

#include "walkindex/core.hpp"

namespace walkindex {

/// Pfaffian by Parlett–Reid skew tridiagonalization with row/column pivoting.
inline Complex pfaffian(ComplexMatrix a, double antisym_tol = 1e-10) {
  if (a.rows() != a.cols()) throw DimensionError("pfaffian: matrix not square");
  const Eigen::Index n = a.rows();
  if (n % 2 != 0) throw DimensionError("pfaffian: odd dimension");
  const double scale = std::max(1.0, max_abs(a));
  if (max_abs(a + a.transpose()) > antisym_tol * scale) throw DomainError("pfaffian: matrix not antisymmetric");
  a = (a - a.transpose()) / 2.0;
  Complex pf = 1.0;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index piv;
    a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&piv);
    piv += k + 1;
    if (piv != k + 1) {
      a.row(k + 1).swap(a.row(piv));
      a.col(k + 1).swap(a.col(piv));
      pf = -pf;
    }
    const Complex pivot = a(k, k + 1);
    if (pivot == Complex(0.0)) return 0.0;
    pf *= pivot;
    if (k + 2 < n) {
      const Eigen::Index m = n - k - 2;
      const ComplexVector tau = a.row(k).tail(m).transpose() / pivot;
      const ComplexVector col = a.col(k + 1).tail(m);
      a.bottomRightCorner(m, m) += tau * col.transpose() - col * tau.transpose();
    }
  }
  return pf;
}

}  // namespace walkindex
