#pragma once

#include "walkindex/boundary.hpp"
#include "walkindex/spectral.hpp"

namespace walkindex {

namespace pauli {
inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

/// Real rotation [[cos θ, −sin θ], [sin θ, cos θ]].
inline ComplexMatrix rotation(double theta) {
  ComplexMatrix m(2, 2);
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

struct Model {
  LaurentMatrix walk;
  SymmetryRep rep;
};

struct SplitStepParams {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// η = complex conjugation, γ = σ₁, τ = σ₁ composed with conjugation.
inline SymmetryRep split_step_rep() {
  return make_rep(SymmetryType::BDI, complex_conjugation(2), std::nullopt, SymOp{pauli::x(), false});
}

namespace detail {
// S↑ moves the upper component one cell right, S↓ the lower one cell left.
inline LaurentMatrix shift_up() {
  LaurentMatrix s(2);
  s.set(0, (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished());
  s.set(1, (ComplexMatrix(2, 2) << 1, 0, 0, 0).finished());
  return s;
}
inline LaurentMatrix shift_down() {
  LaurentMatrix s(2);
  s.set(0, (ComplexMatrix(2, 2) << 1, 0, 0, 0).finished());
  s.set(-1, (ComplexMatrix(2, 2) << 0, 0, 0, 1).finished());
  return s;
}
}  // namespace detail

/// W = B S↓ A S↑ B with B = R(θ₁/2), A = R(θ₂) in every cell.
inline Model split_step(SplitStepParams p) {
  const auto b = LaurentMatrix::monomial(0, rotation(p.theta1 / 2.0));
  const auto a = LaurentMatrix::monomial(0, rotation(p.theta2));
  return {b * detail::shift_down() * a * detail::shift_up() * b, split_step_rep()};
}

inline LaurentMatrix shift_walk(Eigen::Index d, int n) {
  return LaurentMatrix::monomial(n, ComplexMatrix::Identity(d, d));
}

inline LaurentMatrix trivial_walk(const ComplexMatrix& u0) {
  if (!is_unitary_matrix(u0, 1e-10)) throw NotUnitaryError("trivial_walk: cell unitary is not unitary");
  return LaurentMatrix::monomial(0, u0);
}

/// Cellwise 4×4 homotopy between the regrouped split-step walks at
/// (0, π/2) and (0, −π/2).
inline ComplexMatrix bridge_walk(double t) {
  if (t < 0.0 || t > 1.0) throw DomainError("bridge_walk: t must lie in [0,1]");
  const double c = std::cos(kPi * t);
  const double s = std::sin(kPi * t);
  ComplexMatrix m(4, 4);
  m << 0, -c, -s, 0,
       c, 0, 0, s,
       s, 0, 0, -c,
       0, -s, c, 0;
  return m;
}

/// γ = i·diag(𝟙₂, −𝟙₂), η = block swap composed with conjugation.
inline SymmetryRep diii_generator_rep() {
  ComplexMatrix g = ComplexMatrix::Zero(4, 4);
  g.diagonal() << kI, kI, -kI, -kI;
  ComplexMatrix swap = ComplexMatrix::Zero(4, 4);
  swap.topRightCorner(2, 2) = ComplexMatrix::Identity(2, 2);
  swap.bottomLeftCorner(2, 2) = ComplexMatrix::Identity(2, 2);
  return make_rep(SymmetryType::DIII, SymOp{swap, true}, std::nullopt, SymOp{g, false});
}

/// Flat-band DIII walk W = [[0, B̂], [−B̂*, 0]] with B̂(k) = [[0, −e^{−ik}], [e^{ik}, 0]].
inline Model diii_generator() {
  std::map<int, ComplexMatrix> b;
  b[-1] = (ComplexMatrix(2, 2) << 0, -1, 0, 0).finished();
  b[1] = (ComplexMatrix(2, 2) << 0, 0, 1, 0).finished();
  LaurentMatrix w(4);
  for (int x : {-1, 1}) {
    ComplexMatrix blk = ComplexMatrix::Zero(4, 4);
    blk.topRightCorner(2, 2) = b[x];
    blk.bottomLeftCorner(2, 2) = -b[-x].adjoint();
    w.set(x, blk);
  }
  return {w, diii_generator_rep()};
}

/// Split-step walk on a ring of n cells with the coin A at cell 0 replaced
/// by `coin`. Valid decoupling coins (±σ₁, ±iσ₂) cut the ring between cell
/// n−1 and cell 0.
inline FiniteWalk split_step_decoupled(SplitStepParams p, const ComplexMatrix& coin, int n_cells) {
  if (n_cells < 8 || n_cells % 2 != 0) throw DomainError("split_step_decoupled: need an even number of cells ≥ 8");
  if (coin.rows() != 2 || coin.cols() != 2) throw DimensionError("split_step_decoupled: coin must be 2x2");
  if (!is_unitary_matrix(coin, 1e-10)) throw NotUnitaryError("split_step_decoupled: coin is not unitary");
  if (!is_admissible(coin, split_step_rep(), 1e-10))
    throw SymmetryError("split_step_decoupled: coin breaks the BDI symmetry");
  const int n = n_cells;
  const Eigen::Index nd = 2 * n;
  ComplexMatrix b = cellwise(rotation(p.theta1 / 2.0), n);
  ComplexMatrix a = cellwise(rotation(p.theta2), n);
  a.topLeftCorner(2, 2) = coin;
  ComplexMatrix up = ComplexMatrix::Zero(nd, nd);
  ComplexMatrix down = ComplexMatrix::Zero(nd, nd);
  for (int x = 0; x < n; ++x) {
    up(2 * ((x + 1) % n), 2 * x) = 1.0;
    up(2 * x + 1, 2 * x + 1) = 1.0;
    down(2 * ((x + n - 1) % n) + 1, 2 * x + 1) = 1.0;
    down(2 * x, 2 * x) = 1.0;
  }
  FiniteWalk f{n, 2, b * down * a * up * b, {0}};
  if (max_abs(f.U.block(0, nd - 2, 2, 2)) > 1e-12 || max_abs(f.U.block(nd - 2, 0, 2, 2)) > 1e-12)
    throw DomainError("split_step_decoupled: coin does not block transitions across the cut");
  validate_finite(f);
  return f;
}

}  // namespace walkindex
