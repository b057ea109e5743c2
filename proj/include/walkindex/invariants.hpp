#pragma once

#include <functional>
#include <optional>

#include "walkindex/pfaffian.hpp"
#include "walkindex/polynomial.hpp"
#include "walkindex/spectral.hpp"

namespace walkindex {

/// Closed curve in ℂ∖{0} sampled on an increasing parameter grid. The
/// optional evaluator lets `winding` refine coarse steps.
struct PhaseCurve {
  std::vector<double> ks;
  std::vector<Complex> values;
  std::function<Complex(double)> evaluator;
};

inline PhaseCurve make_curve(const std::vector<double>& ks, std::function<Complex(double)> f, bool keep_evaluator = true) {
  PhaseCurve c;
  c.ks = ks;
  c.values.reserve(ks.size());
  for (double k : ks) c.values.push_back(f(k));
  if (keep_evaluator) c.evaluator = std::move(f);
  return c;
}

namespace detail {

inline constexpr double kMinCurveModulus = 1e-10;

inline void require_nonzero(Complex c, double k) {
  if (!(std::abs(c) > kMinCurveModulus))
    throw GapError("winding: curve passes within " + std::to_string(kMinCurveModulus) + " of the origin at " +
                   std::to_string(k));
}

inline double refined_increment(const PhaseCurve& c, double a, Complex ca, double b, Complex cb, int depth) {
  const double d = std::arg(cb / ca);
  if (std::abs(d) < kPi / 2) return d;
  if (!c.evaluator || depth >= 20)
    throw GapError("winding: phase step " + std::to_string(d) + " near parameter " + std::to_string(a) +
                   " could not be resolved (suspected origin crossing)");
  const double m = 0.5 * (a + b);
  const Complex cm = c.evaluator(m);
  require_nonzero(cm, m);
  return refined_increment(c, a, ca, m, cm, depth + 1) + refined_increment(c, m, cm, b, cb, depth + 1);
}

}  // namespace detail

/// Winding number about the origin; steps are bisected until every phase
/// increment is below π/2.
inline long long winding(const PhaseCurve& c) {
  if (c.ks.size() != c.values.size() || c.ks.size() < 2) throw DimensionError("winding: malformed curve");
  for (std::size_t j = 0; j < c.values.size(); ++j) detail::require_nonzero(c.values[j], c.ks[j]);
  const Complex first = c.values.front();
  if (std::abs(c.values.back() - first) > 1e-8 * std::abs(first))
    throw DomainError("winding: curve is not closed");
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < c.values.size(); ++j)
    total += detail::refined_increment(c, c.ks[j], c.values[j], c.ks[j + 1], c.values[j + 1], 0);
  const double w = total / (2.0 * kPi);
  const double r = std::round(w);
  if (std::abs(w - r) > 1e-3) throw ConsistencyError("winding: accumulated phase " + std::to_string(w) + " is not an integer");
  return static_cast<long long>(r);
}

/// Winding of k ↦ det Ŵ(k).
inline long long index_ind(const Symbol& w, int n_samples = 513) {
  auto f = [w](double k) { return w.at(k).determinant(); };
  return winding(make_curve(w.grid(n_samples), f, w.is_exact()));
}

/// Winding of det B̂ by the argument principle: zeros of z^{−d·lo} det B̂ in
/// the unit disk, minus the pole order d·(−lo) at the origin.
inline long long winding_oracle_roots(const LaurentMatrix& b) {
  if (b.is_zero()) throw DomainError("winding_oracle_roots: zero symbol");
  const int d = static_cast<int>(b.dim());
  const int lo = b.lo();
  const int degree = d * (b.hi() - lo);
  const auto f = [&](Complex z) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    for (const auto& [x, blk] : b.coefficients()) m += std::pow(z, x - lo) * blk;
    return m.determinant();
  };
  const Polynomial p = interpolate_on_circle(f, degree);
  const RootSet rs = polynomial_roots(p);
  long long inside = rs.zeros_at_origin;
  for (Complex r : rs.roots) {
    const double a = std::abs(r);
    if (std::abs(a - 1.0) < 1e-6) throw GapError("winding_oracle_roots: determinant vanishes near the unit circle");
    if (a < 1.0) ++inside;
  }
  return inside + static_cast<long long>(d) * lo;
}

/// Hermitian idempotent Q with ηQη⁻¹ + Q = 𝟙.
class FlippedProjection {
 public:
  FlippedProjection(ComplexMatrix q, SymOp eta, double tol = 1e-8) : q_(std::move(q)), eta_(std::move(eta)) {
    const Eigen::Index d = q_.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    if (q_.cols() != d || eta_.dim() != d) throw DimensionError("FlippedProjection: dimension mismatch");
    if (max_abs(q_ - q_.adjoint()) > tol || max_abs(q_ * q_ - q_) > tol)
      throw DomainError("FlippedProjection: not a Hermitian projection");
    if (max_abs(eta_.conjugate_map(q_) + q_ - id) > tol) throw SymmetryError("FlippedProjection: Q is not η-flipped");
    if (d % 2 != 0 || std::abs(q_.trace().real() - d / 2.0) > 1e-6)
      throw DimensionError("FlippedProjection: rank is not half the dimension");
  }

  const ComplexMatrix& matrix() const { return q_; }
  const SymOp& eta() const { return eta_; }
  Eigen::Index rank() const { return q_.rows() / 2; }

  /// Deterministic orthonormal basis of the range (pivoted Gram–Schmidt on the columns).
  ComplexMatrix range_basis() const { return pivoted_orthonormal_columns(q_, 1e-6, rank()); }

 private:
  ComplexMatrix q_;
  SymOp eta_;
};

namespace detail {
inline ComplexMatrix flipped_frame(const ComplexMatrix& phi, const SymOp& eta) {
  ComplexMatrix out(phi.rows(), 2 * phi.cols());
  out << phi, eta.apply(phi);
  return out;
}
}  // namespace detail

/// s(Q, Q′) = det ⟨Φ, Φ′⟩ where Φ = (φ, ηφ) for orthonormal bases φ of the
/// ranges. `phi1`, `phi2` override the default basis choice.
inline int flip_sign(const FlippedProjection& q1, const FlippedProjection& q2,
                     std::optional<ComplexMatrix> phi1 = std::nullopt, std::optional<ComplexMatrix> phi2 = std::nullopt) {
  if (!approx_equal(q1.eta(), q2.eta(), 1e-10)) throw SymmetryError("flip_sign: projections use different η");
  const ComplexMatrix f1 = detail::flipped_frame(phi1 ? *phi1 : q1.range_basis(), q1.eta());
  const ComplexMatrix f2 = detail::flipped_frame(phi2 ? *phi2 : q2.range_basis(), q2.eta());
  if (f1.cols() != f1.rows() || f2.cols() != f2.rows()) throw DimensionError("flip_sign: basis has wrong rank");
  const Complex det = (f1.adjoint() * f2).determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-6 || std::abs(det.imag()) > 1e-6)
    throw ConsistencyError("flip_sign: overlap determinant " + std::to_string(det.real()) + "+" +
                           std::to_string(det.imag()) + "i is not ±1");
  return det.real() > 0 ? 1 : -1;
}

struct Options {
  int n_samples = 513;
  double tol = 1e-8;
  double gap_threshold = 1e-6;
  int closure_steps = 64;
};

struct DReport {
  IndexValue value{IndexGroup::Z2, 0};
  int flip_sign = 1;
  double pfaffian_ratio = 1.0;
};

/// Type D: (−1)^six = s(Q(0), Q(π)), cross-checked with the Pfaffian ratio of
/// the flat-band values in an η-real basis built from Q(0).
inline DReport index_D_report(const Symbol& w, const SymmetryRep& rep) {
  if (rep.stype != SymmetryType::D) throw SymmetryError("index_D: symmetry type is not D");
  const FlippedProjection q0(upper_projection(w.at(0.0)), *rep.eta);
  const FlippedProjection qpi(upper_projection(w.at(kPi)), *rep.eta);
  DReport r;
  r.flip_sign = flip_sign(q0, qpi);

  const ComplexMatrix phi = q0.range_basis();
  const ComplexMatrix ephi = rep.eta->apply(phi);
  const Eigen::Index m = phi.cols();
  ComplexMatrix basis(phi.rows(), 2 * m);
  basis.leftCols(m) = (phi + ephi) / std::sqrt(2.0);
  basis.rightCols(m) = kI * (phi - ephi) / std::sqrt(2.0);
  const auto flat_real = [&](const FlippedProjection& q) {
    const ComplexMatrix u = kI * (2.0 * q.matrix() - ComplexMatrix::Identity(q.matrix().rows(), q.matrix().rows()));
    const ComplexMatrix a = basis.adjoint() * u * basis;
    if (max_abs(a.imag().cast<Complex>()) > 1e-6) throw ConsistencyError("index_D: flat value not real in η-real basis");
    return ComplexMatrix(a.real().cast<Complex>());
  };
  const Complex ratio = pfaffian(flat_real(q0), 1e-6) / pfaffian(flat_real(qpi), 1e-6);
  if (std::abs(std::abs(ratio) - 1.0) > 1e-6 || std::abs(ratio.imag()) > 1e-6)
    throw ConsistencyError("index_D: Pfaffian ratio is not ±1");
  r.pfaffian_ratio = ratio.real();
  if ((ratio.real() > 0) != (r.flip_sign > 0))
    throw ConsistencyError("index_D: flip sign and Pfaffian ratio disagree");
  r.value = IndexValue(IndexGroup::Z2, r.flip_sign > 0 ? 0 : 1);
  return r;
}

inline IndexValue index_D(const Symbol& w, const SymmetryRep& rep) { return index_D_report(w, rep).value; }

struct ChiralReport {
  IndexValue value{IndexGroup::Z, 0};
  long long winding = 0;
  std::optional<int> sign_c0;   // BDI only: sign of the real number det B̂(0)
  std::optional<int> sign_cpi;  // BDI only: sign of det B̂(π)
};

inline PhaseCurve chiral_determinant_curve(const Symbol& w, const ChiralFrame& f, int n_samples) {
  auto c = [w, f](double k) { return chiral_block(w.at(k), f).determinant(); };
  return make_curve(w.grid(n_samples), c, w.is_exact());
}

/// six = wind(det B̂) for AIII, BDI and CII.
inline ChiralReport index_chiral_report(const Symbol& w, const SymmetryRep& rep, const Options& opt = {}) {
  if (rep.stype != SymmetryType::AIII && rep.stype != SymmetryType::BDI && rep.stype != SymmetryType::CII)
    throw SymmetryError("index_chiral: symmetry type " + std::string(to_string(rep.stype)) + " is not AIII, BDI or CII");
  const ChiralFrame f = chiral_frame(rep);
  ChiralReport r;
  r.winding = winding(chiral_determinant_curve(w, f, opt.n_samples));
  if (rep.stype == SymmetryType::CII && r.winding % 2 != 0)
    throw ConsistencyError("index_chiral: odd winding " + std::to_string(r.winding) + " for type CII");
  r.value = IndexValue(index_group(rep.stype), r.winding);
  if (rep.stype == SymmetryType::BDI) {
    const auto sign_at = [&](double k) {
      const Complex c = chiral_block(w.at(k), f).determinant();
      if (std::abs(c.imag()) > 1e-6 * std::max(1.0, std::abs(c)))
        throw ConsistencyError("index_chiral: det B̂ not real at a symmetric momentum");
      return c.real() > 0 ? 1 : -1;
    };
    r.sign_c0 = sign_at(0.0);
    r.sign_cpi = sign_at(kPi);
  }
  return r;
}

inline IndexValue index_chiral(const Symbol& w, const SymmetryRep& rep, const Options& opt = {}) {
  return index_chiral_report(w, rep, opt).value;
}

/// Discrete Wilson-loop Berry phase of the upper bands divided by π.
/// Type D: frames of Q(k), reduced mod 2. Chiral types: the chiral gauge
/// φ(k) = V (−iB̂♭(k)χ, χ)/√2, which returns the winding of det B̂.
inline double berry_upper(const Symbol& w, const SymmetryRep& rep, int n_samples) {
  if (n_samples < 128) throw DomainError("berry_upper: need at least 128 samples");
  const auto ks = w.grid(n_samples);
  const std::size_t n = ks.size();
  double theta = 0.0;
  if (rep.stype == SymmetryType::D) {
    std::vector<ComplexMatrix> frames;
    frames.reserve(n);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const ComplexMatrix q = upper_projection(w.at(ks[j]));
      const auto rank = static_cast<Eigen::Index>(std::lround(q.trace().real()));
      frames.push_back(pivoted_orthonormal_columns(q, 1e-6, rank));
    }
    frames.push_back(frames.front());
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const Complex ov = (frames[j].adjoint() * frames[j + 1]).determinant();
      if (std::abs(ov) < 1e-3) throw GapError("berry_upper: frame overlap nearly singular, grid too coarse");
      theta += std::arg(ov);
    }
    double r = std::fmod(theta / kPi, 2.0);
    if (r < 0) r += 2.0;
    return r;
  }
  const ChiralFrame f = chiral_frame(rep);
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(n);
  for (std::size_t j = 0; j + 1 < n; ++j) blocks.push_back(chiral_block(flat_value(w.at(ks[j])), f));
  blocks.push_back(blocks.front());
  const Eigen::Index r = f.plus_dim;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const Complex ov =
        ((ComplexMatrix::Identity(r, r) + blocks[j].adjoint() * blocks[j + 1]) / 2.0).determinant();
    if (std::abs(ov) < 1e-3) throw GapError("berry_upper: frame overlap nearly singular, grid too coarse");
    theta += std::arg(ov);
  }
  return theta / kPi;
}

/// Standard symplectic form ⊕ [[0, 1], [−1, 0]].
inline ComplexMatrix symplectic_unit(Eigen::Index n) {
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; i += 2) {
    j(i, i + 1) = 1.0;
    j(i + 1, i) = -1.0;
  }
  return j;
}

/// Unitary U with A = U J Uᵀ for an antisymmetric unitary A, built from the
/// quaternionic structure x ↦ A x̄.
inline ComplexMatrix hua_factor(const ComplexMatrix& a_in, double tol = 1e-8) {
  const Eigen::Index n = a_in.rows();
  if (a_in.cols() != n || n % 2 != 0) throw DimensionError("hua_factor: need an even square matrix");
  if (max_abs(a_in + a_in.transpose()) > tol) throw DomainError("hua_factor: matrix not antisymmetric");
  if (!is_unitary_matrix(a_in, 1e-6)) throw NotUnitaryError("hua_factor: matrix not unitary");
  const ComplexMatrix a = (a_in - a_in.transpose()) / 2.0;
  ComplexMatrix cand = ComplexMatrix::Identity(n, n);
  ComplexMatrix u(n, n);
  for (Eigen::Index p = 0; p < n; p += 2) {
    const ComplexMatrix next = pivoted_orthonormal_columns(cand, 1e-6, 1);
    if (next.cols() == 0) throw ConsistencyError("hua_factor: ran out of candidate vectors");
    const ComplexVector x = next.col(0);
    const ComplexVector y = -(a * x.conjugate());
    u.col(p) = x;
    u.col(p + 1) = y;
    cand -= x * (x.adjoint() * cand);
    cand -= y * (y.adjoint() * cand);
  }
  if (max_abs(u * symplectic_unit(n) * u.transpose() - a) > 1e-6)
    throw ConsistencyError("hua_factor: factorization check failed");
  return u;
}

/// t ↦ U(t) J U(t)ᵀ with U(t) = U₀ exp(t log(U₀*U₁)), principal logarithm.
class AntisymmetricPath {
 public:
  AntisymmetricPath(const ComplexMatrix& a0, const ComplexMatrix& a1) : u0_(hua_factor(a0)), j_(symplectic_unit(a0.rows())) {
    if (a1.rows() != a0.rows()) throw DimensionError("antisymmetric_closure: endpoint dimensions differ");
    const ComplexMatrix u1 = hua_factor(a1);
    Eigen::ComplexSchur<ComplexMatrix> schur(u0_.adjoint() * u1);
    z_ = schur.matrixU();
    phases_.resize(a0.rows());
    for (Eigen::Index i = 0; i < a0.rows(); ++i) phases_(i) = std::arg(schur.matrixT()(i, i));
  }

  ComplexMatrix operator()(double t) const {
    ComplexVector e(phases_.size());
    for (Eigen::Index i = 0; i < phases_.size(); ++i) e(i) = std::polar(1.0, t * phases_(i));
    const ComplexMatrix u = u0_ * z_ * e.asDiagonal() * z_.adjoint();
    return u * j_ * u.transpose();
  }

  /// Phase of det U(1) / det U(0), i.e. the continuous change of arg pf along the path.
  double pfaffian_phase_change() const { return phases_.sum(); }

 private:
  ComplexMatrix u0_, j_, z_;
  Eigen::VectorXd phases_;
};

inline std::vector<ComplexMatrix> antisymmetric_closure(const ComplexMatrix& a0, const ComplexMatrix& a1, int steps) {
  if (steps < 1) throw DomainError("antisymmetric_closure: need at least one step");
  const AntisymmetricPath path(a0, a1);
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) {
    ComplexMatrix m = path(static_cast<double>(i) / steps);
    if (max_abs(m + m.transpose()) > 1e-8 || std::abs(m.determinant()) < 1e-6)
      throw ConsistencyError("antisymmetric_closure: path left the antisymmetric invertible matrices");
    out.push_back(std::move(m));
  }
  return out;
}

struct DIIIReport {
  IndexValue value{IndexGroup::TwoZ4, 0};
  long long winding = 0;
  std::optional<IndexValue> berry_value;
};

/// Type DIII: six = 2 wind(c) mod 4, where c runs over det B̂♭(k) for k ∈ [0, π]
/// and is closed through antisymmetric unitaries from B̂♭(π) back to B̂♭(0).
inline DIIIReport index_DIII_report(const Symbol& w, const SymmetryRep& rep, const Options& opt = {},
                                    bool with_berry = true) {
  if (rep.stype != SymmetryType::DIII) throw SymmetryError("index_DIII: symmetry type is not DIII");
  const ChiralFrame f = chiral_frame(rep);
  const auto bflat = [w, f](double k) { return chiral_block(flat_value(w.at(k)), f); };

  std::vector<double> half;
  for (double k : w.grid(opt.n_samples))
    if (k >= -1e-12) half.push_back(std::max(k, 0.0));
  if (half.size() < 2 || std::abs(half.front()) > 1e-12 || std::abs(half.back() - kPi) > 1e-12)
    throw DomainError("index_DIII: grid must contain 0 and π");

  const ComplexMatrix b0 = bflat(0.0);
  const ComplexMatrix bpi = bflat(kPi);
  for (const auto* b : {&b0, &bpi})
    if (max_abs(*b + b->transpose()) > 1e-6) throw ConsistencyError("index_DIII: B̂ not antisymmetric at 0 or π");
  const AntisymmetricPath closure(bpi, b0);

  // Parameter s ∈ [0,1] follows k = πs, s ∈ [1,2] follows the closure.
  const bool exact = w.is_exact();
  auto c = [bflat, closure, exact](double s) -> Complex {
    if (s <= 1.0) {
      if (!exact) throw GapError("index_DIII: sampled symbol cannot be refined between grid points");
      return bflat(kPi * s).determinant();
    }
    return closure(s - 1.0).determinant();
  };
  PhaseCurve curve;
  std::vector<ComplexMatrix> open_blocks;
  for (double k : half) {
    open_blocks.push_back(bflat(k));
    curve.ks.push_back(k / kPi);
    curve.values.push_back(open_blocks.back().determinant());
  }
  for (int i = 1; i <= opt.closure_steps; ++i) {
    const double t = static_cast<double>(i) / opt.closure_steps;
    curve.ks.push_back(1.0 + t);
    curve.values.push_back(i == opt.closure_steps ? curve.values.front() : closure(t).determinant());
  }
  curve.evaluator = c;

  DIIIReport r;
  r.winding = winding(curve);
  r.value = IndexValue(IndexGroup::TwoZ4, 2 * r.winding);
  if (with_berry) {
    const Eigen::Index m = f.plus_dim;
    double theta = 0.0;
    for (std::size_t j = 0; j + 1 < open_blocks.size(); ++j)
      theta += std::arg(((ComplexMatrix::Identity(m, m) + open_blocks[j].adjoint() * open_blocks[j + 1]) / 2.0).determinant());
    const Complex ratio = pfaffian(bpi, 1e-6) / pfaffian(b0, 1e-6);
    const double val = 2.0 / kPi * (theta - std::arg(ratio));
    const double rounded = std::round(val);
    if (std::abs(val - rounded) > 1e-6 || static_cast<long long>(rounded) % 2 != 0)
      throw ConsistencyError("index_DIII: Berry–Pfaffian form " + std::to_string(val) + " is not an even integer");
    r.berry_value = IndexValue(IndexGroup::TwoZ4, static_cast<long long>(rounded));
    if (!(*r.berry_value == r.value))
      throw ConsistencyError("index_DIII: winding and Berry–Pfaffian forms disagree mod 4");
  }
  return r;
}

inline IndexValue index_DIII(const Symbol& w, const SymmetryRep& rep, const Options& opt = {}) {
  return index_DIII_report(w, rep, opt).value;
}

/// Admissibility of samples at paired momenta ±k:
///   ηÛ(k)η⁻¹ = Û(−k),  τÛ(k)τ⁻¹ = Û(−k)*,  γÛ(k)γ⁻¹ = Û(k)*.
inline bool is_admissible(const SampledUnitary& u, const SymmetryRep& rep, double tol) {
  if (rep.dim() != u.dim()) throw DimensionError("is_admissible: dimension mismatch");
  const auto& ks = u.ks();
  const auto& v = u.values();
  const std::size_t n = ks.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t mirror = n - 1 - j;
    if (std::abs(ks[j] + ks[mirror]) > 1e-12) throw DomainError("is_admissible: grid is not symmetric under k ↦ −k");
    if (rep.eta && max_abs(rep.eta->conjugate_map(v[j]) - v[mirror]) > tol) return false;
    if (rep.tau && max_abs(rep.tau->conjugate_map(v[j]) - v[mirror].adjoint()) > tol) return false;
    if (rep.gamma && max_abs(rep.gamma->conjugate_map(v[j]) - v[j].adjoint()) > tol) return false;
  }
  return true;
}

inline bool is_admissible(const Symbol& w, const SymmetryRep& rep, double tol) {
  return w.is_exact() ? is_admissible(w.walk(), rep, tol) : is_admissible(w.samples(), rep, tol);
}

/// Dispatch by symmetry type after checking the representation, admissibility and gap.
inline IndexValue index(const Symbol& w, const SymmetryRep& rep, const Options& opt = {}) {
  require_valid(rep);
  if (!is_admissible(w, rep, opt.tol)) throw SymmetryError("index: walk is not admissible for the symmetry");
  if (gap_min(w, std::max(opt.n_samples, 16)) <= opt.gap_threshold) throw GapError("index: walk is not gapped at ±1");
  switch (rep.stype) {
    case SymmetryType::D: return index_D(w, rep);
    case SymmetryType::AIII:
    case SymmetryType::BDI:
    case SymmetryType::CII: return index_chiral(w, rep, opt);
    case SymmetryType::DIII: return index_DIII(w, rep, opt);
  }
  throw SymmetryError("index: unsupported symmetry type");
}

}  // namespace walkindex
