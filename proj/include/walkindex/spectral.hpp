#pragma once

#include <variant>

#include <Eigen/Eigenvalues>

#include "walkindex/symmetry.hpp"

namespace walkindex {

/// n points from −π to π, both endpoints included.
inline std::vector<double> momentum_grid(int n) {
  if (n < 2) throw DomainError("momentum_grid: need at least two points");
  std::vector<double> ks(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) ks[j] = -kPi + 2.0 * kPi * j / (n - 1);
  ks.front() = -kPi;
  ks.back() = kPi;
  return ks;
}

/// Unitary-valued function on a momentum grid that spans [−π, π].
class SampledUnitary {
 public:
  SampledUnitary(std::vector<double> ks, std::vector<ComplexMatrix> values) : ks_(std::move(ks)), values_(std::move(values)) {
    if (ks_.size() != values_.size() || ks_.size() < 2) throw DimensionError("SampledUnitary: grid/value size mismatch");
    if (std::abs(ks_.front() + kPi) > 1e-12 || std::abs(ks_.back() - kPi) > 1e-12)
      throw DomainError("SampledUnitary: grid must start at −π and end at π");
    for (std::size_t j = 1; j < ks_.size(); ++j)
      if (!(ks_[j] > ks_[j - 1])) throw DomainError("SampledUnitary: grid not strictly increasing");
    for (const auto& v : values_) {
      if (v.rows() != values_.front().rows() || v.cols() != v.rows())
        throw DimensionError("SampledUnitary: inconsistent value dimensions");
      if (!is_unitary_matrix(v, 1e-8)) throw NotUnitaryError("SampledUnitary: sample is not unitary");
    }
    if (max_abs(values_.front() - values_.back()) > 1e-8) throw DomainError("SampledUnitary: values at ±π differ");
  }

  Eigen::Index dim() const { return values_.front().rows(); }
  std::size_t size() const { return ks_.size(); }
  const std::vector<double>& ks() const { return ks_; }
  const std::vector<ComplexMatrix>& values() const { return values_; }

  /// Position of k on the grid; throws if k is not a grid point.
  std::size_t index_of(double k) const {
    auto it = std::lower_bound(ks_.begin(), ks_.end(), k - 1e-12);
    if (it == ks_.end() || std::abs(*it - k) > 1e-12)
      throw DomainError("SampledUnitary: momentum " + std::to_string(k) + " is not on the grid");
    return static_cast<std::size_t>(it - ks_.begin());
  }

  const ComplexMatrix& at(double k) const { return values_[index_of(k)]; }

 private:
  std::vector<double> ks_;
  std::vector<ComplexMatrix> values_;
};

inline SampledUnitary sample(const LaurentMatrix& w, int n_samples) {
  auto ks = momentum_grid(n_samples);
  std::vector<ComplexMatrix> values;
  values.reserve(ks.size());
  for (double k : ks) values.push_back(evaluate(w, k));
  return {std::move(ks), std::move(values)};
}

/// Either an exact strictly local walk or its samples. Index formulas accept
/// both; only the former can be refined between grid points.
class Symbol {
 public:
  Symbol(LaurentMatrix w) : src_(std::move(w)) {}
  Symbol(SampledUnitary s) : src_(std::move(s)) {}

  Eigen::Index dim() const {
    return std::visit([](const auto& s) { return s.dim(); }, src_);
  }

  bool is_exact() const { return std::holds_alternative<LaurentMatrix>(src_); }
  const LaurentMatrix& walk() const { return std::get<LaurentMatrix>(src_); }
  const SampledUnitary& samples() const { return std::get<SampledUnitary>(src_); }

  ComplexMatrix at(double k) const {
    if (is_exact()) return evaluate(walk(), k);
    return samples().at(k);
  }

  /// Grid used by sampled formulas: the requested uniform grid for exact
  /// walks, the stored grid otherwise.
  std::vector<double> grid(int n_samples) const {
    if (is_exact()) return momentum_grid(n_samples);
    return samples().ks();
  }

 private:
  std::variant<LaurentMatrix, SampledUnitary> src_;
};

inline double distance_to_real_axis_points(Complex z) { return std::min(std::abs(z - 1.0), std::abs(z + 1.0)); }

inline double gap_min(const Symbol& w, int n_samples) {
  if (w.is_exact()) return gap_min(w.walk(), n_samples);
  double best = 2.0;
  for (const auto& v : w.samples().values()) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(v, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      best = std::min(best, distance_to_real_axis_points(es.eigenvalues()(i)));
  }
  return best;
}

struct BandPoint {
  double k = 0.0;
  std::vector<double> eigenphases;       // ascending, in (−π, π]
  std::vector<ComplexMatrix> projections; // one per distinct eigenphase
};

/// Spectral resolution of a unitary (normal) matrix. Eigenphases closer than
/// `merge_tol` share one projection.
inline BandPoint band_point(const ComplexMatrix& u, double k = 0.0, double merge_tol = 1e-8) {
  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  const ComplexMatrix& z = schur.matrixU();
  const auto& t = schur.matrixT();
  const Eigen::Index d = u.rows();
  std::vector<std::pair<double, Eigen::Index>> phases;
  for (Eigen::Index i = 0; i < d; ++i) {
    double w = std::arg(t(i, i));
    if (w <= -kPi) w += 2.0 * kPi;
    phases.emplace_back(w, i);
  }
  std::sort(phases.begin(), phases.end());
  BandPoint bp;
  bp.k = k;
  for (std::size_t i = 0; i < phases.size();) {
    std::size_t j = i;
    ComplexMatrix q = ComplexMatrix::Zero(d, d);
    while (j < phases.size() && std::abs(std::polar(1.0, phases[j].first) - std::polar(1.0, phases[i].first)) <= merge_tol) {
      q += z.col(phases[j].second) * z.col(phases[j].second).adjoint();
      ++j;
    }
    bp.eigenphases.push_back(phases[i].first);
    bp.projections.push_back(std::move(q));
    i = j;
  }
  return bp;
}

inline BandPoint band_point(const LaurentMatrix& w, double k) { return band_point(evaluate(w, k), k); }

/// Spectral projection onto eigenphases in (0, π), read off the positive
/// eigenvalues of the Hermitian part Im U = (U − U*)/2i.
inline ComplexMatrix upper_projection(const ComplexMatrix& u, double gap_tol = 1e-8) {
  const ComplexMatrix h = (u - u.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& ev = es.eigenvalues();
  ComplexMatrix q = ComplexMatrix::Zero(u.rows(), u.cols());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) < gap_tol)
      throw GapError("upper_projection: eigenvalue within " + std::to_string(gap_tol) + " of ±1");
    if (ev(i) > 0) q += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return q;
}

inline ComplexMatrix upper_projection(const LaurentMatrix& w, double k) { return upper_projection(evaluate(w, k)); }

/// Flat-band value iQ − i(𝟙 − Q).
inline ComplexMatrix flat_value(const ComplexMatrix& u) {
  const ComplexMatrix q = upper_projection(u);
  return kI * (2.0 * q - ComplexMatrix::Identity(u.rows(), u.cols()));
}

inline SampledUnitary flatten(const Symbol& w, int n_samples) {
  auto ks = w.grid(n_samples);
  std::vector<ComplexMatrix> values;
  values.reserve(ks.size());
  for (double k : ks) values.push_back(flat_value(w.at(k)));
  return {std::move(ks), std::move(values)};
}

inline SampledUnitary flatten(const LaurentMatrix& w, int n_samples) { return flatten(Symbol(w), n_samples); }

/// Basis adapted to the chiral splitting: V*γV = i^s diag(𝟙, −𝟙).
struct ChiralFrame {
  ComplexMatrix V;
  Eigen::Index plus_dim = 0;
  int s = 0;
};

namespace detail {

inline void fix_real_sign(ComplexMatrix& basis) {
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    const Eigen::Index i = largest_component_index(basis.col(j));
    const Complex c = basis(i, j);
    const double ref = std::abs(c.real()) > 1e-9 ? c.real() : c.imag();
    if (ref < 0) basis.col(j) *= -1.0;
  }
}

// Columns sorted by the position of their largest entry.
inline void sort_columns(ComplexMatrix& basis) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(basis.cols()));
  for (Eigen::Index j = 0; j < basis.cols(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return largest_component_index(basis.col(a)) < largest_component_index(basis.col(b));
  });
  ComplexMatrix sorted(basis.rows(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) sorted.col(j) = basis.col(order[j]);
  basis = std::move(sorted);
}

inline ComplexMatrix generic_basis(const ComplexMatrix& p) {
  ComplexMatrix b = pivoted_orthonormal_columns(p, 1e-6);
  normalize_column_phases(b);
  sort_columns(b);
  return b;
}

// Basis of ran p made of vectors fixed by the antiunitary η (η² = 𝟙, ηp = pη).
inline ComplexMatrix real_basis(const ComplexMatrix& p, const SymOp& eta) {
  const Eigen::Index d = p.rows();
  ComplexMatrix cand(d, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const ComplexVector w = p.col(j);
    const ComplexVector ew = eta.apply(w);
    cand.col(2 * j) = w + ew;
    cand.col(2 * j + 1) = kI * (w - ew);
  }
  ComplexMatrix b = pivoted_orthonormal_columns(cand, 1e-6);
  fix_real_sign(b);
  sort_columns(b);
  return b;
}

// Kramers-pair basis (φ, ηφ, ...) of ran p for η² = −𝟙.
inline ComplexMatrix kramers_basis(const ComplexMatrix& p, const SymOp& eta) {
  ComplexMatrix cand = p;
  const Eigen::Index d = p.rows();
  ComplexMatrix basis(d, 0);
  while (true) {
    ComplexMatrix next = pivoted_orthonormal_columns(cand, 1e-6, 1);
    if (next.cols() == 0) break;
    ComplexVector phi = next.col(0);
    normalize_column_phases(next);
    phi = next.col(0);
    const ComplexVector partner = eta.apply(phi);
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 2);
    basis.col(basis.cols() - 2) = phi;
    basis.col(basis.cols() - 1) = partner;
    cand -= phi * (phi.adjoint() * cand);
    cand -= partner * (partner.adjoint() * cand);
  }
  return basis;
}

}  // namespace detail

/// Deterministic chiral frame for the representation. Types with an
/// antiunitary η commuting with the splitting get η-compatible bases
/// (real for BDI, Kramers pairs for CII); for DIII the minus space is
/// the η-image of the plus space.
inline ChiralFrame chiral_frame(const SymmetryRep& rep) {
  const ComplexMatrix g = rep.hermitian_chirality();
  const Eigen::Index d = g.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix p_plus = (id + g) / 2.0;
  const ComplexMatrix p_minus = (id - g) / 2.0;
  const auto rank = [](const ComplexMatrix& p) { return static_cast<Eigen::Index>(std::lround(p.trace().real())); };
  if (rank(p_plus) != rank(p_minus))
    throw DimensionError("chiral_frame: unbalanced cell, γ eigenspaces have dimensions " +
                         std::to_string(rank(p_plus)) + " and " + std::to_string(rank(p_minus)));
  ComplexMatrix plus, minus;
  switch (rep.stype) {
    case SymmetryType::BDI:
      plus = detail::real_basis(p_plus, *rep.eta);
      minus = detail::real_basis(p_minus, *rep.eta);
      break;
    case SymmetryType::CII:
      plus = detail::kramers_basis(p_plus, *rep.eta);
      minus = detail::kramers_basis(p_minus, *rep.eta);
      break;
    case SymmetryType::DIII:
      plus = detail::generic_basis(p_plus);
      minus = rep.eta->apply(plus);
      break;
    default:
      plus = detail::generic_basis(p_plus);
      minus = detail::generic_basis(p_minus);
  }
  if (plus.cols() != rank(p_plus) || minus.cols() != rank(p_minus))
    throw ConsistencyError("chiral_frame: basis construction lost rank");
  ChiralFrame f;
  f.plus_dim = plus.cols();
  f.s = rep.gamma_phase_exponent();
  f.V.resize(d, d);
  f.V << plus, minus;
  return f;
}

/// Upper-right block of V*UV.
inline ComplexMatrix chiral_block(const ComplexMatrix& u, const ChiralFrame& f) {
  const Eigen::Index r = f.plus_dim;
  return (f.V.adjoint() * u * f.V).block(0, r, r, r);
}

inline ComplexMatrix chiral_block_B(const Symbol& w, const ChiralFrame& f, double k) { return chiral_block(w.at(k), f); }

inline ComplexMatrix chiral_block_B(const Symbol& w, const SymmetryRep& rep, double k) {
  return chiral_block(w.at(k), chiral_frame(rep));
}

/// The B block as a Laurent polynomial (coefficientwise frame change).
inline LaurentMatrix chiral_block_laurent(const LaurentMatrix& w, const ChiralFrame& f) {
  LaurentMatrix b(f.plus_dim);
  for (const auto& [x, blk] : w.coefficients()) b.set(x, chiral_block(blk, f));
  return b;
}

}  // namespace walkindex
