#pragma once

#include <Eigen/SVD>

#include "walkindex/polynomial.hpp"
#include "walkindex/spectral.hpp"

namespace walkindex {

/// Exponential solution φ(x) = λ^x φ₀ of W̃(λ)φ₀ = sφ₀ with |λ| < 1.
struct DecayMode {
  Complex lambda;
  int multiplicity = 1;
  ComplexVector vector;
};

/// Matrix pencil W̃(λ) − s𝟙.
inline ComplexMatrix decay_pencil(const LaurentMatrix& w, Complex lambda, int s) {
  return evaluate_analytic(w, lambda) - static_cast<double>(s) * ComplexMatrix::Identity(w.dim(), w.dim());
}

/// Roots of det(W̃(λ) − s𝟙) inside the unit disk with their null vectors.
/// Roots at λ = 0 are spurious (the pencil is singular there) and dropped.
inline std::vector<DecayMode> decay_roots(const LaurentMatrix& w, int s) {
  if (s != 1 && s != -1) throw DomainError("decay_roots: s must be ±1");
  const int d = static_cast<int>(w.dim());
  const int a = std::max(w.hi(), 0);
  const int b = std::min(w.lo(), 0);
  const int degree = d * (a - b);
  // λ^{d·a} det(W̃(λ) − s): each row is multiplied by λ^a.
  const auto f = [&](Complex z) {
    ComplexMatrix m = -static_cast<double>(s) * std::pow(z, a) * ComplexMatrix::Identity(d, d);
    for (const auto& [y, blk] : w.coefficients()) m += std::pow(z, a - y) * blk;
    return m.determinant();
  };
  const Polynomial p = interpolate_on_circle(f, degree);
  if (p.max_coeff_abs() <= 1e-12) throw GapError("decay_roots: determinant vanishes identically");
  const RootSet rs = polynomial_roots(p);

  std::vector<Complex> inside;
  for (Complex r : rs.roots) {
    if (std::abs(std::abs(r) - 1.0) < 1e-6) throw GapError("decay_roots: root on the unit circle");
    if (std::abs(r) < 1e-12) continue;
    if (std::abs(r) < 1.0) inside.push_back(newton_polish(p, r));
  }
  std::sort(inside.begin(), inside.end(), [](Complex x, Complex y) {
    if (std::abs(std::abs(x) - std::abs(y)) > 1e-9) return std::abs(x) > std::abs(y);
    return std::arg(x) < std::arg(y);
  });

  std::vector<DecayMode> out;
  for (Complex r : inside) {
    bool merged = false;
    for (auto& m : out)
      if (std::abs(m.lambda - r) < 1e-6) {
        ++m.multiplicity;
        merged = true;
        break;
      }
    if (merged) continue;
    Eigen::JacobiSVD<ComplexMatrix> svd(decay_pencil(w, r, s), Eigen::ComputeFullV);
    DecayMode m;
    m.lambda = r;
    m.vector = svd.matrixV().col(d - 1);
    out.push_back(std::move(m));
  }
  return out;
}

/// Slowest decay: max |λ| over the decay modes.
inline double predict_decay(const LaurentMatrix& w, int s) {
  const auto modes = decay_roots(w, s);
  if (modes.empty()) throw DomainError("predict_decay: no decaying solutions at s = " + std::to_string(s));
  double best = 0.0;
  for (const auto& m : modes) best = std::max(best, std::abs(m.lambda));
  return best;
}

/// Explicit walk on cells 0..n−1 that is decoupled between cell n−1 and cell 0.
/// Cells [0, n/2) form the right half-space next to the cut.
struct FiniteWalk {
  int n_cells = 0;
  Eigen::Index d = 0;
  ComplexMatrix U;
  std::vector<int> cut_positions{0};

  Eigen::VectorXd cell_weights(const ComplexVector& v) const {
    Eigen::VectorXd w(n_cells);
    for (int x = 0; x < n_cells; ++x) w(x) = v.segment(x * d, d).norm();
    return w;
  }
};

inline void validate_finite(const FiniteWalk& f) {
  if (f.U.rows() != f.n_cells * f.d || f.U.cols() != f.U.rows()) throw DimensionError("FiniteWalk: wrong matrix size");
  if (!is_unitary_matrix(f.U, 1e-8)) throw NotUnitaryError("FiniteWalk: assembled operator is not unitary");
}

/// Generic decoupling: truncate W to the open chain and replace the result
/// by its unitary polar part. Exact kernel directions (ker X = ker X*) are
/// completed by the identity.
inline FiniteWalk build_finite(const LaurentMatrix& w, int n_cells) {
  const int reach = std::max(std::abs(w.lo()), std::abs(w.hi()));
  if (n_cells < 4 * reach + 4) throw DomainError("build_finite: too few cells for the hopping range");
  const Eigen::Index d = w.dim();
  const Eigen::Index nd = n_cells * d;
  ComplexMatrix x = ComplexMatrix::Zero(nd, nd);
  for (int i = 0; i < n_cells; ++i)
    for (const auto& [y, blk] : w.coefficients()) {
      const int j = i - y;
      if (j >= 0 && j < n_cells) x.block(i * d, j * d, d, d) = blk;
    }
  Eigen::BDCSVD<ComplexMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-9) ++rank;
  const Eigen::Index k = nd - rank;
  ComplexMatrix u = svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).adjoint();
  if (k > 0) {
    const ComplexMatrix left = svd.matrixU().rightCols(k);
    const ComplexMatrix right = svd.matrixV().rightCols(k);
    const ComplexMatrix p_left = left * left.adjoint();
    const ComplexMatrix p_right = right * right.adjoint();
    if (max_abs(p_left - p_right) > 1e-6)
      throw AmbiguityError("build_finite: kernel of the truncated walk differs from that of its adjoint");
    u += p_right;
  }
  FiniteWalk f{n_cells, d, std::move(u), {0}};
  validate_finite(f);
  return f;
}

enum class Side { Left, Right };

inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

struct BoundaryMode {
  int s = 1;
  double chirality = 0.0;
  Side side = Side::Right;
  double fitted_lambda = 0.0;
  double residual = 0.0;
  ComplexVector vector;
};

namespace detail {

// Exponential rate from a log-linear fit over cells [2, n/2) measured from the cut.
inline double fit_decay(const FiniteWalk& f, const ComplexVector& v, Side side) {
  const Eigen::VectorXd w = f.cell_weights(v);
  const double peak = w.maxCoeff();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int dist = 2; dist < f.n_cells / 2; ++dist) {
    const int cell = side == Side::Right ? dist : f.n_cells - 1 - dist;
    const double a = w(cell);
    if (a <= 1e-10 * peak) continue;
    const double y = std::log(a);
    sx += dist;
    sy += y;
    sxx += double(dist) * dist;
    sxy += dist * y;
    ++count;
  }
  if (count < 2) return 0.0;
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return std::exp(slope);
}

}  // namespace detail

/// Eigenvectors of F at ±1, split by localization side and, for chiral
/// types, by chirality. Eigenvalues of Im F in (tol, 100 tol] are treated as
/// hybridized boundary modes and rejected.
inline std::vector<BoundaryMode> boundary_modes(const FiniteWalk& f, const SymmetryRep& rep, double tol = 1e-6) {
  validate_finite(f);
  const Eigen::Index nd = f.U.rows();
  const ComplexMatrix h = (f.U - f.U.adjoint()) / Complex(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  std::vector<Eigen::Index> sel;
  for (Eigen::Index i = 0; i < nd; ++i) {
    const double a = std::abs(es.eigenvalues()(i));
    if (a < tol) sel.push_back(i);
    else if (a <= 1e2 * tol)
      throw AmbiguityError("boundary_modes: eigenvalue " + std::to_string(a) +
                           " of Im F lies just outside the kernel tolerance; the boundary modes hybridize, "
                           "increase the number of cells");
  }
  std::vector<BoundaryMode> out;
  if (sel.empty()) return out;
  ComplexMatrix kernel(nd, static_cast<Eigen::Index>(sel.size()));
  for (std::size_t j = 0; j < sel.size(); ++j) kernel.col(j) = es.eigenvectors().col(sel[j]);

  const ComplexMatrix re = kernel.adjoint() * ((f.U + f.U.adjoint()) / 2.0) * kernel;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> res(re);
  Eigen::VectorXd right_mask = Eigen::VectorXd::Zero(nd);
  for (int x = 0; x < f.n_cells / 2; ++x) right_mask.segment(x * f.d, f.d).setOnes();
  const ComplexMatrix chir = rep.gamma ? cellwise(rep.hermitian_chirality(), f.n_cells) : ComplexMatrix();

  for (int s : {1, -1}) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < res.eigenvalues().size(); ++i)
      if (std::abs(res.eigenvalues()(i) - s) < 1e-3) cols.push_back(i);
    if (cols.empty()) continue;
    ComplexMatrix e(nd, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) e.col(j) = kernel * res.eigenvectors().col(cols[j]);

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> side_es(e.adjoint() * right_mask.cast<Complex>().asDiagonal() * e);
    for (Side side : {Side::Right, Side::Left}) {
      std::vector<Eigen::Index> pick;
      for (Eigen::Index i = 0; i < side_es.eigenvalues().size(); ++i) {
        const double wgt = side_es.eigenvalues()(i);
        if (wgt > 0.1 && wgt < 0.9)
          throw AmbiguityError("boundary_modes: mode with weight " + std::to_string(wgt) +
                               " on the right half straddles both sides; increase the number of cells");
        if ((side == Side::Right) == (wgt >= 0.9)) pick.push_back(i);
      }
      if (pick.empty()) continue;
      ComplexMatrix sub(nd, static_cast<Eigen::Index>(pick.size()));
      for (std::size_t j = 0; j < pick.size(); ++j) sub.col(j) = e * side_es.eigenvectors().col(pick[j]);

      Eigen::VectorXd chirality = Eigen::VectorXd::Zero(sub.cols());
      if (rep.gamma) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> ces(sub.adjoint() * chir * sub);
        sub = sub * ces.eigenvectors();
        chirality = ces.eigenvalues();
      }
      for (Eigen::Index j = 0; j < sub.cols(); ++j) {
        BoundaryMode m;
        m.s = s;
        m.side = side;
        m.chirality = chirality(j);
        m.vector = sub.col(j);
        m.residual = (f.U * m.vector - static_cast<double>(s) * m.vector).norm();
        m.fitted_lambda = detail::fit_decay(f, m.vector, side);
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

/// Symmetry index of the right half-space read from the boundary modes.
inline IndexValue six_oracle(const FiniteWalk& f, const SymmetryRep& rep, double tol = 1e-6) {
  const auto modes = boundary_modes(f, rep, tol);
  long long total = 0;
  for (const auto& m : modes) {
    if (m.side != Side::Right) continue;
    if (rep.stype == SymmetryType::D || rep.stype == SymmetryType::DIII) {
      ++total;
      continue;
    }
    const double r = std::round(m.chirality);
    if (std::abs(m.chirality - r) > 1e-3)
      throw AmbiguityError("six_oracle: chirality " + std::to_string(m.chirality) + " is not ±1");
    total += static_cast<long long>(r);
  }
  return {index_group(rep.stype), total};
}

}  // namespace walkindex
