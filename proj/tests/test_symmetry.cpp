#include <gtest/gtest.h>

#include "support/random_walks.hpp"

using namespace walkindex;
using namespace walkindex::testing;

namespace {
constexpr std::array kTypes{SymmetryType::D, SymmetryType::AIII, SymmetryType::BDI, SymmetryType::CII,
                            SymmetryType::DIII};
}

TEST(CheckRep, SplitStepBDI) { EXPECT_TRUE(check_rep(split_step_rep())); }

TEST(CheckRep, ConjugationIsTypeD) {
  EXPECT_TRUE(check_rep(SymmetryRep{SymmetryType::D, complex_conjugation(2), std::nullopt, std::nullopt}));
}

TEST(CheckRep, DIIIWithGammaSquarePlusOneFails) {
  SymmetryRep r = diii_generator_rep();
  r.gamma = SymOp{diag_signs({1, 1, -1, -1}), false};
  EXPECT_FALSE(check_rep(r));
}

TEST(CheckRep, CanonicalAndRotatedRepsAreValid) {
  Rng rng(11);
  for (auto t : kTypes)
    for (Eigen::Index d : {4, 8}) {
      const auto rep = canonical_rep(t, d);
      EXPECT_TRUE(check_rep(rep)) << to_string(t) << " d=" << d;
      EXPECT_TRUE(check_rep(rotate_rep(rep, random_unitary(rng, d)))) << to_string(t);
    }
}

TEST(CheckRep, RejectsWrongProductAndMissingOperator) {
  auto r = split_step_rep();
  r.tau = SymOp{-r.tau->matrix, true};
  EXPECT_FALSE(check_rep(r));
  auto r2 = split_step_rep();
  r2.gamma.reset();
  EXPECT_FALSE(check_rep(r2));
  auto r3 = split_step_rep();
  r3.gamma->antiunitary = true;
  EXPECT_FALSE(check_rep(r3));
}

TEST(SymmetryType, TrivialClassesRejected) {
  for (const char* s : {"A", "AI", "AII", "C", "CI"}) EXPECT_THROW(parse_symmetry_type(s), SymmetryError);
  EXPECT_THROW(parse_symmetry_type("XYZ"), SymmetryError);
  EXPECT_EQ(parse_symmetry_type("CII"), SymmetryType::CII);
}

TEST(IsAdmissible, SplitStepIsBDI) {
  Rng rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto m = split_step({rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)});
    EXPECT_TRUE(is_admissible(m.walk, m.rep, 1e-12));
  }
}

TEST(IsAdmissible, ShiftIsRealForConjugation) {
  EXPECT_TRUE(is_admissible(shift_walk(1, 1), SymmetryRep{SymmetryType::D, complex_conjugation(1), {}, {}}, 1e-14));
  EXPECT_FALSE(is_admissible(LaurentMatrix::monomial(1, ComplexMatrix::Constant(1, 1, kI)),
                             SymmetryRep{SymmetryType::D, complex_conjugation(1), {}, {}}, 1e-14));
}

TEST(IsAdmissible, RotationCoinSatisfiesChiralRelation) {
  const SymmetryRep chiral{SymmetryType::AIII, std::nullopt, std::nullopt, SymOp{pauli::x(), false}};
  EXPECT_TRUE(is_admissible(trivial_walk(rotation(0.7)), chiral, 1e-14));
  EXPECT_FALSE(is_admissible(trivial_walk(pauli::z() * rotation(0.7)), chiral, 1e-14));
}

TEST(IsAdmissible, DimensionMismatchThrows) {
  EXPECT_THROW(is_admissible(shift_walk(3, 1), split_step_rep(), 1e-10), DimensionError);
}

TEST(IsAdmissible, RandomWalksAndAdjointsForEveryType) {
  Rng rng(13);
  for (auto t : kTypes) {
    const auto rep = canonical_rep(t, 4);
    for (int i = 0; i < 5; ++i) {
      const auto w = random_admissible_walk(rng, rep, 2);
      ASSERT_TRUE(is_unitary(w, 1e-10));
      EXPECT_TRUE(is_admissible(w, rep, 1e-10)) << to_string(t);
      EXPECT_TRUE(is_admissible(adjoint(w), rep, 1e-10)) << to_string(t);
    }
  }
}

TEST(FiniteSi, EmptyKernel) {
  const SymmetryRep d{SymmetryType::D, complex_conjugation(2), {}, {}};
  EXPECT_EQ(finite_si(kI * pauli::y(), d), IndexValue(IndexGroup::Z2, 0));
}

TEST(FiniteSi, HermitianUnitaryHasFullKernel) {
  const SymmetryRep r{SymmetryType::AIII, std::nullopt, std::nullopt, SymOp{pauli::z(), false}};
  EXPECT_EQ(finite_si(pauli::x(), r), IndexValue(IndexGroup::Z, 0));
}

TEST(FiniteSi, SplitByEigenvalue) {
  const SymmetryRep r{SymmetryType::AIII, std::nullopt, std::nullopt, SymOp{pauli::x(), false}};
  const auto split = finite_si_split(pauli::x(), r);
  EXPECT_EQ(split.plus, IndexValue(IndexGroup::Z, 1));
  EXPECT_EQ(split.minus, IndexValue(IndexGroup::Z, -1));
  EXPECT_EQ(finite_si(pauli::x(), r), IndexValue(IndexGroup::Z, 0));
  const auto neg = finite_si_split(-pauli::x(), r);
  EXPECT_EQ(neg.plus, IndexValue(IndexGroup::Z, -1));
  EXPECT_EQ(neg.minus, IndexValue(IndexGroup::Z, 1));
}

TEST(FiniteSi, NonUnitaryAndAmbiguous) {
  const SymmetryRep r{SymmetryType::D, complex_conjugation(2), {}, {}};
  EXPECT_THROW(finite_si(ComplexMatrix::Identity(2, 2) * 2.0, r), NotUnitaryError);
  ComplexMatrix near = rotation(2.5e-8);  // singular values of U − U* are 2 sin θ
  EXPECT_THROW(finite_si(near, r, 1e-8), AmbiguityError);
}

namespace {
// Admissible finite unitary F γ F* γ* with F commuting with η, where γ may be unbalanced.
ComplexMatrix random_finite_admissible(Rng& rng, const SymmetryRep& rep) {
  const ComplexMatrix f =
      rep.eta ? random_commuting_unitary(rng, *rep.eta) : random_unitary(rng, rep.dim());
  return f * rep.gamma->matrix * f.adjoint() * rep.gamma->matrix.adjoint();
}
}  // namespace

TEST(FiniteSi, EqualsTraceOfGammaForUnbalancedCells) {
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    const SymmetryRep r{SymmetryType::AIII, std::nullopt, std::nullopt, SymOp{diag_signs({1, 1, 1, -1}), false}};
    const ComplexMatrix u = random_finite_admissible(rng, r);
    EXPECT_EQ(finite_si(u, r), IndexValue(IndexGroup::Z, 2));
  }
}

TEST(FiniteSi, AdditiveAndInvariantUnderSymmetricConjugation) {
  Rng rng(15);
  const SymmetryRep r1 = make_rep(SymmetryType::BDI, complex_conjugation(3), std::nullopt,
                                  SymOp{diag_signs({1, 1, -1}), false});
  const SymmetryRep r2 = make_rep(SymmetryType::BDI, complex_conjugation(3), std::nullopt,
                                  SymOp{diag_signs({-1, -1, 1}), false});
  for (int i = 0; i < 10; ++i) {
    const ComplexMatrix u1 = random_finite_admissible(rng, r1), u2 = random_finite_admissible(rng, r2);
    ASSERT_TRUE(is_admissible(u1, r1, 1e-10));
    const auto sum = finite_si(block_diagonal(u1, u2), direct_sum(r1, r2));
    EXPECT_EQ(sum, finite_si(u1, r1) + finite_si(u2, r2));
    const ComplexMatrix v = random_symmetric_unitary(rng, r1);
    EXPECT_EQ(finite_si(v * u1 * v.adjoint(), r1), finite_si(u1, r1));
  }
}

TEST(FiniteSi, CIIKernelTraceIsEven) {
  Rng rng(16);
  const auto base = canonical_rep(SymmetryType::CII, 4);
  // γ restricted to an unbalanced pair of Kramers-invariant blocks.
  SymmetryRep r = base;
  r.gamma = SymOp{diag_signs({1, 1, 1, 1}), false};
  r.tau = compose(*r.eta, *r.gamma);
  ASSERT_TRUE(check_rep(r));
  for (int i = 0; i < 5; ++i) {
    const auto si = finite_si(random_finite_admissible(rng, r), r);
    EXPECT_EQ(si.value() % 2, 0);
  }
}

TEST(IndexValue, GroupReduction) {
  EXPECT_EQ(IndexValue(IndexGroup::Z2, 3).value(), 1);
  EXPECT_EQ(IndexValue(IndexGroup::TwoZ4, 6).value(), 2);
  EXPECT_EQ(IndexValue(IndexGroup::TwoZ4, -2).value(), 2);
  EXPECT_EQ((IndexValue(IndexGroup::TwoZ4, 2) + IndexValue(IndexGroup::TwoZ4, 2)).value(), 0);
  EXPECT_THROW(IndexValue(IndexGroup::TwoZ, 1), ConsistencyError);
  EXPECT_THROW(IndexValue(IndexGroup::Z, 1) + IndexValue(IndexGroup::Z2, 1), ConsistencyError);
}

TEST(GapMin, FlatCoinHasGapSqrtTwo) {
  EXPECT_NEAR(gap_min(trivial_walk(-kI * pauli::y()), 64), std::sqrt(2.0), 1e-12);
}

TEST(GapMin, ShiftPlusAntishiftIsGapless) {
  EXPECT_LT(gap_min(direct_sum(shift_walk(1, 1), shift_walk(1, -1)), 65), 1e-12);
}

TEST(GapMin, SplitStepInteriorPointIsGapped) {
  EXPECT_GT(gap_min(split_step({kPi / 8, -kPi / 4}).walk, 513), 0.1);
  EXPECT_THROW(gap_min(shift_walk(1, 1), 8), DomainError);
}
