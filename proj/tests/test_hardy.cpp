#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/hardy.hpp"

using namespace qdil;

namespace {

ComplexVector poly_to_vector(const TruncatedHardy& sp, const oracle::Poly& f) {
  ComplexVector v = ComplexVector::Zero(sp.dim());
  for (const auto& [k, a] : f) {
    const std::size_t mono = sp.monomial_index(k);
    for (Eigen::Index t = 0; t < sp.e_dim(); ++t) v(sp.basis_index(mono, t)) += a(t);
  }
  return v;
}

}  // namespace

TEST(TruncatedHardy, Sizes) {
  EXPECT_EQ(TruncatedHardy(2, 1, 2).monomial_count(), 9u);
  EXPECT_EQ(TruncatedHardy(3, 2, 3).dim(), 128);
  EXPECT_EQ(TruncatedHardy(0, 3, 5).monomial_count(), 1u);
  EXPECT_EQ(TruncatedHardy::kBasisOrder, "graded-lex, coeff-innermost");
}

TEST(TruncatedHardy, GradedLexOrder) {
  const TruncatedHardy sp(2, 1, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1},
                                         {2, 0}, {1, 2}, {2, 1}, {2, 2}};
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(sp.monomial(i), expected[i]);
}

TEST(TruncatedHardy, IndexRoundTrip) {
  const TruncatedHardy sp(3, 2, 3);
  for (std::size_t i = 0; i < sp.monomial_count(); ++i) {
    EXPECT_EQ(sp.monomial_index(sp.monomial(i)), i);
  }
  const std::vector<int> outside{4, 0, 0};
  EXPECT_FALSE(sp.contains(outside));
  EXPECT_THROW(sp.monomial_index(outside), Error);
}

TEST(Shift, OneVariable) {
  const TruncatedHardy sp(1, 1, 1);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(1, 0) = 1.0;
  EXPECT_EQ(shift_matrix(sp, 0), expected);
}

TEST(Shift, CommuteAndIsometricOnInterior) {
  const TruncatedHardy sp(2, 2, 3);
  const ComplexMatrix m1 = shift_matrix(sp, 0), m2 = shift_matrix(sp, 1);
  const ComplexMatrix inner = basis_columns(sp.dim(), sp.basis_up_to(1));
  EXPECT_EQ((m1 * m2 - m2 * m1) * inner, ComplexMatrix::Zero(sp.dim(), inner.cols()));
  const ComplexMatrix edge = basis_columns(sp.dim(), sp.basis_up_to(2));
  EXPECT_EQ(edge.adjoint() * m1.adjoint() * m1 * edge, identity(edge.cols()));
}

TEST(Rotation, Examples) {
  const TruncatedHardy sp(2, 1, 2);
  EXPECT_EQ(rotation_matrix(sp, PhaseMatrix::zero(2), 0), identity(sp.dim()));
  const PhaseMatrix p = PhaseMatrix::uniform(2, std::numbers::pi);
  const ComplexMatrix r = rotation_matrix(sp, p, 0);
  const std::vector<int> k01{0, 1};
  const auto idx = static_cast<Eigen::Index>(sp.monomial_index(k01));
  EXPECT_NEAR(std::abs(r(idx, idx) - Complex(0.0, 1.0)), 0.0, 1e-15);
  const ComplexMatrix r2 = rotation_matrix(sp, p, 0, 2);
  EXPECT_NEAR(std::abs(r2(idx, idx) + 1.0), 0.0, 1e-15);
  EXPECT_LE((r.adjoint() * r - identity(sp.dim())).norm(), 1e-14);
}

TEST(RotationalShift, ZeroPhaseIsShift) {
  const TruncatedHardy sp(2, 1, 3);
  EXPECT_EQ(rotational_shift(sp, PhaseMatrix::zero(2), 1), shift_matrix(sp, 1));
}

TEST(RotationalShift, MatchesPolynomialOracle) {
  Rng rng(21);
  const TruncatedHardy sp(3, 2, 3);
  const PhaseMatrix p = random_phases(rng, 3);
  for (std::size_t trial = 0; trial < 4; ++trial) {
    oracle::Poly f;
    for (std::size_t i = 0; i < sp.monomial_count(); i += 3) {
      f[sp.monomial(i)] = gaussian_matrix(rng, 2, 1).col(0);
    }
    const ComplexVector x = poly_to_vector(sp, f);
    for (std::size_t m = 0; m < 3; ++m) {
      const ComplexVector got = rotational_shift(sp, p, m) * x;
      const ComplexVector want = poly_to_vector(sp, oracle::rotational_shift(f, p.matrix(), m, 3));
      EXPECT_LE((got - want).norm(), 1e-13);
    }
  }
}

TEST(RotationalShift, AntiCommuteAtPi) {
  const TruncatedHardy sp(2, 1, 4);
  const PhaseMatrix p = PhaseMatrix::uniform(2, std::numbers::pi);
  const ComplexMatrix v1 = rotational_shift(sp, p, 0), v2 = rotational_shift(sp, p, 1);
  const ComplexMatrix inner = basis_columns(sp.dim(), sp.basis_up_to(2));
  EXPECT_LE(((v1 * v2 + v2 * v1) * inner).norm(), 1e-14);
}

TEST(MonomialOp, DenseAndApplyAgree) {
  Rng rng(22);
  const TruncatedHardy sp(2, 3, 3);
  const PhaseMatrix p = random_phases(rng, 2);
  const auto vars = all_vars(2);
  const ComplexMatrix u = random_unitary(rng, 3);
  const ComplexMatrix x = gaussian_matrix(rng, sp.dim(), 2);
  const MonomialOp ops[] = {shift_op(sp, 0), rotation_op(sp, p, 1, 2, vars),
                            rotational_shift_op(sp, p, 1, vars)};
  for (const auto& op : ops) {
    const ComplexMatrix d = op.dense();
    EXPECT_LE((op.apply(x) - d * x).norm(), 1e-13);
    EXPECT_LE((op.apply_adjoint(x) - d.adjoint() * x).norm(), 1e-13);
  }
  // a phase index outside the variables: unitary coefficient times R^2
  const TruncatedHardy one(1, 3, 3);
  const std::vector<std::size_t> v0{0};
  const MonomialOp tw = twisted_unitary_op(one, p, 1, u, v0);
  const ComplexMatrix d = tw.dense();
  EXPECT_LE((d.adjoint() * d - identity(one.dim())).norm(), 1e-13);
}

TEST(RotationalProperties, SmallCases) {
  Rng rng(23);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int d = 2; d <= 4; ++d) {
      const TruncatedHardy sp(n, 2, d);
      const RotationalReport r = verify_rotational_properties(sp, random_phases(rng, n));
      EXPECT_TRUE(r.passed) << n << " " << d;
      EXPECT_TRUE(r.nilpotent);
      EXPECT_LE(r.q_commutation, 1e-12);
      EXPECT_LE(r.adjoint_formula, 1e-12);
      EXPECT_LE(r.isometry, 1e-12);
      EXPECT_LE(r.doubly, 1e-12);
      EXPECT_EQ(r.adjoint_power_norms.back(), 0.0);
    }
  }
}
