#pragma once

#include <cmath>
#include <map>
#include <string>

#include "walkindex/core.hpp"

namespace walkindex {

/// Strictly local translation-invariant operator, stored as its finitely many
/// jump blocks W(x), so that (Wψ)(x) = Σ_y W(y) ψ(x−y).
///
/// Fourier convention: Ŵ(k) = Σ_x e^{ikx} W(x), so translation by one cell has
/// symbol e^{ik}. Every winding number in this library inherits that sign.
class LaurentMatrix {
 public:
  static constexpr double kTrimThreshold = 1e-14;

  LaurentMatrix() = default;

  explicit LaurentMatrix(Eigen::Index dim) : dim_(dim) {
    if (dim < 0) throw DimensionError("LaurentMatrix: negative cell dimension");
  }

  LaurentMatrix(Eigen::Index dim, std::map<int, ComplexMatrix> coeffs) : LaurentMatrix(dim) {
    for (auto& [x, block] : coeffs) set(x, std::move(block));
  }

  static LaurentMatrix identity(Eigen::Index dim) { return monomial(0, ComplexMatrix::Identity(dim, dim)); }

  static LaurentMatrix monomial(int x, ComplexMatrix block) {
    if (block.rows() != block.cols()) throw DimensionError("LaurentMatrix: coefficient blocks must be square");
    LaurentMatrix w(block.rows());
    w.set(x, std::move(block));
    return w;
  }

  Eigen::Index dim() const { return dim_; }
  bool is_zero() const { return coeffs_.empty(); }
  int lo() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
  int hi() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
  const std::map<int, ComplexMatrix>& coefficients() const { return coeffs_; }

  ComplexMatrix coeff(int x) const {
    auto it = coeffs_.find(x);
    return it == coeffs_.end() ? ComplexMatrix::Zero(dim_, dim_) : it->second;
  }

  // Blocks of negligible size are dropped, which keeps lo/hi canonical.
  void set(int x, ComplexMatrix block) {
    if (block.rows() != dim_ || block.cols() != dim_)
      throw DimensionError("LaurentMatrix: block is " + std::to_string(block.rows()) + "x" +
                           std::to_string(block.cols()) + ", expected " + std::to_string(dim_));
    if (!block.allFinite()) throw DomainError("LaurentMatrix: non-finite coefficient");
    if (max_abs(block) <= kTrimThreshold) {
      coeffs_.erase(x);
    } else {
      coeffs_[x] = std::move(block);
    }
  }

  void add_to(int x, const ComplexMatrix& block) { set(x, coeff(x) + block); }

  LaurentMatrix operator+(const LaurentMatrix& o) const {
    require_same_dim(o);
    LaurentMatrix r = *this;
    for (const auto& [x, b] : o.coeffs_) r.add_to(x, b);
    return r;
  }

  LaurentMatrix operator-(const LaurentMatrix& o) const { return *this + o * Complex(-1.0); }

  LaurentMatrix operator*(Complex a) const {
    LaurentMatrix r(dim_);
    for (const auto& [x, b] : coeffs_) r.set(x, a * b);
    return r;
  }

  /// Convolution (W1·W2)(x) = Σ_y W1(y) W2(x−y).
  LaurentMatrix operator*(const LaurentMatrix& o) const {
    require_same_dim(o);
    LaurentMatrix r(dim_);
    for (const auto& [x1, b1] : coeffs_)
      for (const auto& [x2, b2] : o.coeffs_) r.add_to(x1 + x2, b1 * b2);
    return r;
  }

  /// Cellwise map X ↦ M X N applied to every coefficient.
  LaurentMatrix sandwich(const ComplexMatrix& m, const ComplexMatrix& n) const {
    LaurentMatrix r(m.rows());
    for (const auto& [x, b] : coeffs_) r.set(x, m * b * n);
    return r;
  }

  LaurentMatrix entrywise_conjugate() const {
    LaurentMatrix r(dim_);
    for (const auto& [x, b] : coeffs_) r.set(x, b.conjugate());
    return r;
  }

  double max_coeff_abs() const {
    double m = 0.0;
    for (const auto& [x, b] : coeffs_) m = std::max(m, max_abs(b));
    return m;
  }

  bool approx_equal(const LaurentMatrix& o, double tol) const {
    if (dim_ != o.dim_) return false;
    return (*this - o).max_coeff_abs() <= tol;
  }

 private:
  void require_same_dim(const LaurentMatrix& o) const {
    if (dim_ != o.dim_)
      throw DimensionError("LaurentMatrix: dimension mismatch " + std::to_string(dim_) + " vs " +
                           std::to_string(o.dim_));
  }

  Eigen::Index dim_ = 0;
  std::map<int, ComplexMatrix> coeffs_;
};

/// Ŵ(k) = Σ_x e^{ikx} W(x).
inline ComplexMatrix evaluate(const LaurentMatrix& w, double k) {
  ComplexMatrix out = ComplexMatrix::Zero(w.dim(), w.dim());
  for (const auto& [x, b] : w.coefficients()) out += std::polar(1.0, k * x) * b;
  return out;
}

/// W̃(λ) = Σ_y W(y) λ^{−y}; on the unit circle W̃(e^{−ik}) = Ŵ(k).
inline ComplexMatrix evaluate_analytic(const LaurentMatrix& w, Complex lambda) {
  if (lambda == Complex(0.0)) throw DomainError("evaluate_analytic: λ = 0");
  ComplexMatrix out = ComplexMatrix::Zero(w.dim(), w.dim());
  for (const auto& [x, b] : w.coefficients()) out += std::pow(lambda, -x) * b;
  return out;
}

inline LaurentMatrix laurent_multiply(const LaurentMatrix& a, const LaurentMatrix& b) { return a * b; }

/// (W*)(x) = W(−x)†.
inline LaurentMatrix adjoint(const LaurentMatrix& w) {
  LaurentMatrix r(w.dim());
  for (const auto& [x, b] : w.coefficients()) r.set(-x, b.adjoint());
  return r;
}

/// Exact Laurent identity W*W = WW* = 𝟙, checked coefficientwise.
inline bool is_unitary(const LaurentMatrix& w, double tol) {
  const auto id = LaurentMatrix::identity(w.dim());
  const auto wa = adjoint(w);
  return (wa * w - id).max_coeff_abs() <= tol && (w * wa - id).max_coeff_abs() <= tol;
}

/// Pairs cells (2x, 2x+1) into one cell of twice the dimension.
inline LaurentMatrix regroup(const LaurentMatrix& w) {
  const Eigen::Index d = w.dim();
  LaurentMatrix r(2 * d);
  if (w.is_zero()) return r;
  const int lo = static_cast<int>(std::floor((w.lo() - 1) / 2.0));
  const int hi = static_cast<int>(std::ceil((w.hi() + 1) / 2.0));
  for (int x = lo; x <= hi; ++x) {
    ComplexMatrix b(2 * d, 2 * d);
    b << w.coeff(2 * x), w.coeff(2 * x - 1), w.coeff(2 * x + 1), w.coeff(2 * x);
    r.set(x, std::move(b));
  }
  return r;
}

inline ComplexMatrix block_diagonal(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

inline LaurentMatrix direct_sum(const LaurentMatrix& a, const LaurentMatrix& b) {
  LaurentMatrix r(a.dim() + b.dim());
  for (const auto& [x, blk] : a.coefficients()) r.add_to(x, block_diagonal(blk, b.coeff(x)));
  for (const auto& [x, blk] : b.coefficients())
    if (!a.coefficients().contains(x)) r.add_to(x, block_diagonal(a.coeff(x), blk));
  return r;
}

}  // namespace walkindex
