#pragma once

#include <algorithm>
#include <complex>
#include <numbers>
#include <vector>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace walkindex {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Error hierarchy. Callers that need to distinguish failure classes (the CLI
// maps them to exit codes) catch the specific type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Spectrum touches +1 or -1 (or a block that must be invertible is singular).
class GapError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  using Error::Error;
};

class NotUnitaryError : public Error {
 public:
  using Error::Error;
};

// A numerical decision (kernel rank, localization side, integer rounding)
// could not be made reliably at the requested tolerance.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class ConsistencyError : public Error {
 public:
  using Error::Error;
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_unitary_matrix(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  const auto id = ComplexMatrix::Identity(u.rows(), u.cols());
  return max_abs(u.adjoint() * u - id) <= tol && max_abs(u * u.adjoint() - id) <= tol;
}

/// Orthonormal basis for the column span of `candidates`, built by greedy
/// Gram-Schmidt that always takes the candidate with the largest remaining
/// norm (ties resolved by lowest column index). Columns whose residual norm
/// falls below `drop_tol` are discarded. At most `max_rank` vectors are
/// returned, or all of them when `max_rank` is negative.
inline ComplexMatrix pivoted_orthonormal_columns(ComplexMatrix candidates, double drop_tol = 1e-8,
                                                 Eigen::Index max_rank = -1) {
  const Eigen::Index n = candidates.rows();
  const Eigen::Index m = candidates.cols();
  if (max_rank < 0) max_rank = std::min(n, m);
  ComplexMatrix basis(n, 0);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  while (basis.cols() < max_rank) {
    Eigen::Index best = -1;
    double best_norm = drop_tol;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double nrm = candidates.col(j).norm();
      if (nrm > best_norm * (1.0 + 1e-12)) {
        best_norm = nrm;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    ComplexVector v = candidates.col(best) / best_norm;
    // second pass against accumulated basis for stability
    v -= basis * (basis.adjoint() * v);
    v.normalize();
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      candidates.col(j) -= v * v.dot(candidates.col(j));
    }
  }
  return basis;
}

/// Multiplies each column by a phase so that its largest-magnitude entry
/// (lowest index on ties) is real and positive.
inline void normalize_column_phases(ComplexMatrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < basis.rows(); ++i) {
      const double a = std::abs(basis(i, j));
      if (a > best + 1e-12) {
        best = a;
        arg = i;
      }
    }
    if (best > 0.0) basis.col(j) *= std::conj(basis(arg, j)) / best;
  }
}

/// 𝟙_cells ⊗ m: the same one-cell matrix acting on every cell.
inline ComplexMatrix cellwise(const ComplexMatrix& m, Eigen::Index cells) {
  const Eigen::Index d = m.rows();
  ComplexMatrix out = ComplexMatrix::Zero(cells * d, cells * d);
  for (Eigen::Index c = 0; c < cells; ++c) out.block(c * d, c * d, d, d) = m;
  return out;
}

inline Eigen::Index largest_component_index(const ComplexVector& v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best + 1e-12) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  return arg;
}

}  // namespace walkindex
