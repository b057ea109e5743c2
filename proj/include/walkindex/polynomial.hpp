#pragma once

#include <functional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "walkindex/core.hpp"

namespace walkindex {

/// Scalar polynomial with coefficients in ascending order, p(z) = Σ_j c[j] z^j.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs) : c_(std::move(coeffs)) {}

  const std::vector<Complex>& coefficients() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  Complex operator()(Complex z) const {
    Complex acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    std::vector<Complex> d;
    for (std::size_t j = 1; j < c_.size(); ++j) d.push_back(static_cast<double>(j) * c_[j]);
    return Polynomial(std::move(d));
  }

  double max_coeff_abs() const {
    double m = 0.0;
    for (auto c : c_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  std::vector<Complex> c_;
};

/// Recovers a polynomial of degree ≤ `degree` from its values on the
/// (degree+1)-th roots of unity (inverse DFT, exact up to rounding).
inline Polynomial interpolate_on_circle(const std::function<Complex(Complex)>& f, int degree) {
  if (degree < 0) throw DomainError("interpolate_on_circle: negative degree");
  const int m = degree + 1;
  std::vector<Complex> values(static_cast<std::size_t>(m));
  std::vector<Complex> nodes(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    nodes[j] = std::polar(1.0, 2.0 * kPi * j / m);
    values[j] = f(nodes[j]);
  }
  std::vector<Complex> c(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) {
    Complex acc = 0.0;
    for (int j = 0; j < m; ++j) acc += values[j] * std::polar(1.0, -2.0 * kPi * ((static_cast<long>(p) * j) % m) / m);
    c[p] = acc / static_cast<double>(m);
  }
  return Polynomial(std::move(c));
}

struct RootSet {
  std::vector<Complex> roots;  // nonzero roots from the companion matrix
  int zeros_at_origin = 0;     // multiplicity of the root z = 0
};

/// Roots via companion-matrix eigenvalues. Coefficients below `rel_tol` times
/// the largest are treated as exact zeros: high-order ones lower the degree,
/// low-order ones are counted as roots at the origin.
inline RootSet polynomial_roots(const Polynomial& p, double rel_tol = 1e-12) {
  std::vector<Complex> c = p.coefficients();
  const double scale = p.max_coeff_abs();
  if (scale == 0.0) throw DomainError("polynomial_roots: identically zero polynomial");
  while (!c.empty() && std::abs(c.back()) <= rel_tol * scale) c.pop_back();
  RootSet out;
  std::size_t first = 0;
  while (first < c.size() && std::abs(c[first]) <= rel_tol * scale) ++first;
  out.zeros_at_origin = static_cast<int>(first);
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(first));
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return out;
  ComplexMatrix comp = ComplexMatrix::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<ComplexMatrix> es(comp, false);
  if (es.info() != Eigen::Success) throw ConsistencyError("polynomial_roots: eigenvalue iteration failed");
  for (int i = 0; i < n; ++i) out.roots.push_back(es.eigenvalues()(i));
  return out;
}

/// A few Newton steps; keeps the start value if an iterate does not improve |p|.
inline Complex newton_polish(const Polynomial& p, Complex z, int iterations = 4) {
  const Polynomial dp = p.derivative();
  for (int it = 0; it < iterations; ++it) {
    const Complex d = dp(z);
    if (std::abs(d) == 0.0) break;
    const Complex next = z - p(z) / d;
    if (!(std::abs(p(next)) < std::abs(p(z)))) break;
    z = next;
  }
  return z;
}

}  // namespace walkindex
