#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "walkindex/laurent.hpp"

namespace walkindex {

/// One-cell (anti)unitary operator: x ↦ M x, or x ↦ M x̄ when antiunitary.
/// Conjugation is entrywise in the canonical basis.
struct SymOp {
  ComplexMatrix matrix;
  bool antiunitary = false;

  Eigen::Index dim() const { return matrix.rows(); }

  ComplexVector apply(const ComplexVector& v) const { return matrix * (antiunitary ? v.conjugate().eval() : v); }

  ComplexMatrix apply(const ComplexMatrix& cols) const {
    return matrix * (antiunitary ? cols.conjugate().eval() : cols);
  }

  /// S X S⁻¹ for a linear map X.
  ComplexMatrix conjugate_map(const ComplexMatrix& x) const {
    return matrix * (antiunitary ? x.conjugate().eval() : x) * matrix.adjoint();
  }

  friend SymOp compose(const SymOp& a, const SymOp& b) {
    return {a.matrix * (a.antiunitary ? b.matrix.conjugate().eval() : b.matrix), a.antiunitary != b.antiunitary};
  }

  SymOp square() const { return compose(*this, *this); }
};

inline bool approx_equal(const SymOp& a, const SymOp& b, double tol) {
  return a.antiunitary == b.antiunitary && a.matrix.rows() == b.matrix.rows() &&
         max_abs(a.matrix - b.matrix) <= tol;
}

inline SymOp complex_conjugation(Eigen::Index d) { return {ComplexMatrix::Identity(d, d), true}; }

enum class SymmetryType { D, AIII, BDI, CII, DIII };

inline std::string_view to_string(SymmetryType t) {
  switch (t) {
    case SymmetryType::D: return "D";
    case SymmetryType::AIII: return "AIII";
    case SymmetryType::BDI: return "BDI";
    case SymmetryType::CII: return "CII";
    case SymmetryType::DIII: return "DIII";
  }
  return "?";
}

inline SymmetryType parse_symmetry_type(std::string_view s) {
  for (auto t : {SymmetryType::D, SymmetryType::AIII, SymmetryType::BDI, SymmetryType::CII, SymmetryType::DIII})
    if (s == to_string(t)) return t;
  for (std::string_view trivial : {"A", "AI", "AII", "C", "CI"})
    if (s == trivial)
      throw SymmetryError("symmetry type " + std::string(s) + " has trivial index group and is not supported");
  throw SymmetryError("unknown symmetry type '" + std::string(s) + "'");
}

struct SymmetryRep {
  SymmetryType stype = SymmetryType::D;
  std::optional<SymOp> eta;
  std::optional<SymOp> tau;
  std::optional<SymOp> gamma;

  Eigen::Index dim() const {
    for (const auto* op : {&eta, &tau, &gamma})
      if (*op) return (*op)->dim();
    return 0;
  }

  bool is_chiral() const { return stype != SymmetryType::D; }

  /// Operator that is Hermitian with square 𝟙: γ for γ² = 𝟙, −iγ for γ² = −𝟙.
  ComplexMatrix hermitian_chirality() const {
    if (!gamma) throw SymmetryError("symmetry type " + std::string(to_string(stype)) + " has no chiral symmetry");
    return gamma_phase_exponent() == 0 ? gamma->matrix : (Complex(0, -1) * gamma->matrix).eval();
  }

  /// s with γ² = i^{2s}.
  int gamma_phase_exponent() const { return stype == SymmetryType::DIII ? 1 : 0; }
};

// Expected squares: +1, −1, or 0 for "absent".
struct SquareTable {
  int eta, tau, gamma;
};

inline SquareTable expected_squares(SymmetryType t) {
  switch (t) {
    case SymmetryType::D: return {1, 0, 0};
    case SymmetryType::AIII: return {0, 0, 1};
    case SymmetryType::BDI: return {1, 1, 1};
    case SymmetryType::CII: return {-1, -1, 1};
    case SymmetryType::DIII: return {1, -1, -1};
  }
  return {0, 0, 0};
}

/// Fills in the missing third operator from the relation τ = η∘γ.
inline SymmetryRep make_rep(SymmetryType t, std::optional<SymOp> eta, std::optional<SymOp> tau,
                            std::optional<SymOp> gamma) {
  const auto sq = expected_squares(t);
  const auto scaled = [](SymOp op, int sign) {
    op.matrix *= static_cast<double>(sign);
    return op;
  };
  if (sq.tau != 0) {
    if (eta && gamma && !tau) tau = compose(*eta, *gamma);
    if (eta && tau && !gamma) gamma = scaled(compose(*eta, *tau), sq.eta);
    if (tau && gamma && !eta) eta = scaled(compose(*tau, *gamma), sq.gamma);
  }
  return {t, std::move(eta), std::move(tau), std::move(gamma)};
}

namespace detail {
inline bool square_is(const SymOp& op, int sign, double tol) {
  const auto sq = op.square();
  return !sq.antiunitary &&
         max_abs(sq.matrix - static_cast<double>(sign) * ComplexMatrix::Identity(op.dim(), op.dim())) <= tol;
}
}  // namespace detail

/// True iff the operators present match the type's squares, are unitary,
/// antiunitary as required, commute pairwise and satisfy τ = η∘γ.
inline bool check_rep(const SymmetryRep& rep, double tol = 1e-10) {
  const auto sq = expected_squares(rep.stype);
  const std::array<std::pair<const std::optional<SymOp>*, int>, 3> ops{
      {{&rep.eta, sq.eta}, {&rep.tau, sq.tau}, {&rep.gamma, sq.gamma}}};
  const std::array<bool, 3> anti{true, true, false};
  const Eigen::Index d = rep.dim();
  if (d == 0 && (rep.eta || rep.tau || rep.gamma)) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& [op, want] = ops[i];
    if (want == 0) {
      if (op->has_value()) return false;
      continue;
    }
    if (!op->has_value()) return false;
    const SymOp& s = **op;
    if (s.antiunitary != anti[i] || s.dim() != d || !is_unitary_matrix(s.matrix, tol)) return false;
    if (!detail::square_is(s, want, tol)) return false;
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (!ops[i].first->has_value() || !ops[j].first->has_value()) continue;
      if (!approx_equal(compose(**ops[i].first, **ops[j].first), compose(**ops[j].first, **ops[i].first), tol))
        return false;
    }
  if (rep.eta && rep.tau && rep.gamma && !approx_equal(compose(*rep.eta, *rep.gamma), *rep.tau, tol)) return false;
  return true;
}

inline void require_valid(const SymmetryRep& rep) {
  if (!check_rep(rep))
    throw SymmetryError("symmetry operators do not form a valid " + std::string(to_string(rep.stype)) +
                        " representation");
}

/// Coefficient-level symmetry relations (gap not checked):
///   η W(x) η⁻¹ = W(x),   τ W(x) τ⁻¹ = W(−x)†,   γ W(x) γ⁻¹ = W(−x)†.
inline bool is_admissible(const LaurentMatrix& w, const SymmetryRep& rep, double tol) {
  if (rep.dim() != w.dim())
    throw DimensionError("is_admissible: walk has cell dimension " + std::to_string(w.dim()) +
                         " but symmetry acts on " + std::to_string(rep.dim()));
  const auto check = [&](const SymOp& op, bool reflect) {
    int lo = std::min(w.lo(), -w.hi());
    int hi = std::max(w.hi(), -w.lo());
    for (int x = lo; x <= hi; ++x) {
      const ComplexMatrix target = reflect ? ComplexMatrix(w.coeff(-x).adjoint()) : w.coeff(x);
      if (max_abs(op.conjugate_map(w.coeff(x)) - target) > tol) return false;
    }
    return true;
  };
  if (rep.eta && !check(*rep.eta, false)) return false;
  if (rep.tau && !check(*rep.tau, true)) return false;
  if (rep.gamma && !check(*rep.gamma, true)) return false;
  return true;
}

/// Same relations for a single-cell unitary (a walk without hopping).
inline bool is_admissible(const ComplexMatrix& u, const SymmetryRep& rep, double tol) {
  return is_admissible(LaurentMatrix::monomial(0, u), rep, tol);
}

inline SymOp direct_sum(const SymOp& a, const SymOp& b) {
  if (a.antiunitary != b.antiunitary) throw SymmetryError("direct_sum: mixing unitary and antiunitary operators");
  return {block_diagonal(a.matrix, b.matrix), a.antiunitary};
}

inline SymmetryRep direct_sum(const SymmetryRep& a, const SymmetryRep& b) {
  if (a.stype != b.stype) throw SymmetryError("direct_sum: symmetry types differ");
  const auto sum = [](const std::optional<SymOp>& x, const std::optional<SymOp>& y) -> std::optional<SymOp> {
    if (!x || !y) return std::nullopt;
    return direct_sum(*x, *y);
  };
  return {a.stype, sum(a.eta, b.eta), sum(a.tau, b.tau), sum(a.gamma, b.gamma)};
}

/// Symmetry of the pair-regrouped walk: each operator acts on both cells.
inline SymmetryRep regroup(const SymmetryRep& rep) { return direct_sum(rep, rep); }

enum class IndexGroup { Z, Z2, TwoZ, TwoZ4 };

inline std::string_view to_string(IndexGroup g) {
  switch (g) {
    case IndexGroup::Z: return "Z";
    case IndexGroup::Z2: return "Z2";
    case IndexGroup::TwoZ: return "2Z";
    case IndexGroup::TwoZ4: return "2Z4";
  }
  return "?";
}

inline IndexGroup index_group(SymmetryType t) {
  switch (t) {
    case SymmetryType::D: return IndexGroup::Z2;
    case SymmetryType::AIII:
    case SymmetryType::BDI: return IndexGroup::Z;
    case SymmetryType::CII: return IndexGroup::TwoZ;
    case SymmetryType::DIII: return IndexGroup::TwoZ4;
  }
  return IndexGroup::Z;
}

/// Element of an index group, stored as its reduced representative.
class IndexValue {
 public:
  IndexValue(IndexGroup g, long long v) : group_(g), value_(v) {
    if ((g == IndexGroup::TwoZ || g == IndexGroup::TwoZ4) && v % 2 != 0)
      throw ConsistencyError("IndexValue: odd value " + std::to_string(v) + " in group " + std::string(to_string(g)));
    if (g == IndexGroup::Z2) value_ = ((v % 2) + 2) % 2;
    if (g == IndexGroup::TwoZ4) value_ = ((v % 4) + 4) % 4;
  }

  IndexGroup group() const { return group_; }
  long long value() const { return value_; }

  IndexValue operator+(const IndexValue& o) const {
    if (group_ != o.group_) throw ConsistencyError("IndexValue: adding elements of different groups");
    return {group_, value_ + o.value_};
  }
  IndexValue operator-() const { return {group_, -value_}; }

  bool operator==(const IndexValue&) const = default;

  friend std::ostream& operator<<(std::ostream& os, const IndexValue& v) {
    return os << v.value_ << " in " << to_string(v.group_);
  }

 private:
  IndexGroup group_;
  long long value_;
};

namespace detail {

// Orthonormal basis of ker(U − U*), refusing singular values in (tol, 10·tol).
inline ComplexMatrix real_spectrum_kernel(const ComplexMatrix& u, double tol) {
  if (!is_unitary_matrix(u, 1e-8)) throw NotUnitaryError("finite_si: matrix is not unitary");
  Eigen::JacobiSVD<ComplexMatrix> svd(u - u.adjoint(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol && sv(i) < 10.0 * tol)
      throw AmbiguityError("finite_si: singular value " + std::to_string(sv(i)) + " inside the ambiguity band");
    if (sv(i) > tol) ++rank;
  }
  return svd.matrixV().rightCols(sv.size() - rank);
}

inline IndexValue kernel_index(const ComplexMatrix& basis, Eigen::Index total_dim, const SymmetryRep& rep) {
  const auto group = index_group(rep.stype);
  if (rep.stype == SymmetryType::D || rep.stype == SymmetryType::DIII) return {group, basis.cols()};
  if (total_dim % rep.dim() != 0) throw DimensionError("finite_si: size is not a multiple of the cell dimension");
  const ComplexMatrix g = cellwise(rep.hermitian_chirality(), total_dim / rep.dim());
  const Complex tr = (basis.adjoint() * g * basis).trace();
  const double r = std::round(tr.real());
  if (std::abs(tr.real() - r) > 1e-6 || std::abs(tr.imag()) > 1e-6)
    throw AmbiguityError("finite_si: chirality trace " + std::to_string(tr.real()) + " is not an integer");
  return {group, static_cast<long long>(r)};
}

}  // namespace detail

/// Symmetry index of a finite-dimensional admissible unitary, read off the
/// kernel N = ker(U − U*): dim N mod 2 (D), tr γ|_N (AIII, BDI, CII), dim N mod 4 (DIII).
inline IndexValue finite_si(const ComplexMatrix& u, const SymmetryRep& rep, double tol = 1e-8) {
  return detail::kernel_index(detail::real_spectrum_kernel(u, tol), u.rows(), rep);
}

struct SplitIndex {
  IndexValue plus;
  IndexValue minus;
};

/// The same count restricted to the eigenvalue +1 and −1 parts of N.
inline SplitIndex finite_si_split(const ComplexMatrix& u, const SymmetryRep& rep, double tol = 1e-8) {
  const ComplexMatrix n = detail::real_spectrum_kernel(u, tol);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(n.adjoint() * ((u + u.adjoint()) / 2.0) * n);
  const auto part = [&](double sign) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) * sign > 0) cols.push_back(i);
    ComplexMatrix b(u.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) b.col(j) = n * es.eigenvectors().col(cols[j]);
    return detail::kernel_index(b, u.rows(), rep);
  };
  return {part(1.0), part(-1.0)};
}

/// min over the grid and over the spectrum of the distance to ±1.
inline double gap_min(const LaurentMatrix& w, int n_samples) {
  if (n_samples < 16) throw DomainError("gap_min: need at least 16 samples");
  double best = 2.0;
  for (int j = 0; j < n_samples; ++j) {
    const double k = -kPi + 2.0 * kPi * j / (n_samples - 1);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(evaluate(w, k), false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const Complex z = es.eigenvalues()(i);
      best = std::min({best, std::abs(z - 1.0), std::abs(z + 1.0)});
    }
  }
  return best;
}

}  // namespace walkindex
