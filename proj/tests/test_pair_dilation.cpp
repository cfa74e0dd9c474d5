#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/pair_dilation.hpp"

using namespace qdil;

namespace {

ComplexMatrix scalar(Complex z) { return ComplexMatrix::Constant(1, 1, z); }

ComplexMatrix slot_block(const ComplexMatrix& m, const TruncatedPairSpace& sp, std::size_t row,
                         std::size_t col) {
  return m.block(sp.slot_offset(row), sp.slot_offset(col), sp.h_dim, sp.h_dim);
}

// Compression of V1^a V2^b to H, computed from the matrices directly.
ComplexMatrix compressed_word(const PairDilation& d, int a, int b) {
  const Eigen::Index h = d.space.h_dim;
  ComplexMatrix x = ComplexMatrix::Identity(d.space.dim(), h);
  for (int i = 0; i < b; ++i) x = d.v2 * x;
  for (int i = 0; i < a; ++i) x = d.v1 * x;
  return x.topRows(h);
}

QPair random_pair(Variant v, Eigen::Index h, std::uint64_t seed) {
  Rng rng(seed);
  return gen_sylvester_qpair(h, v, random_unitary(rng, h), seed, 0.9);
}

}  // namespace

TEST(BuildW, ZeroContraction) {
  const TruncatedPairSpace sp{1, 2};
  const ComplexMatrix w = build_W(scalar(0.0), scalar(1.0), false, sp);
  ASSERT_EQ(w.rows(), 9);
  EXPECT_EQ(w(1, 0), Complex(1.0));  // D_T = I
  EXPECT_EQ(w(3, 1), Complex(1.0));
  EXPECT_EQ(w(4, 2), Complex(1.0));
  EXPECT_EQ(w(0, 0), Complex(0.0));
  EXPECT_EQ(w.col(7).norm(), 0.0);  // pushed past the cap
}

TEST(BuildW, ScalarContraction) {
  const TruncatedPairSpace sp{1, 2};
  const ComplexMatrix w = build_W(scalar(0.6), scalar(1.0), false, sp);
  EXPECT_NEAR(w(0, 0).real(), 0.6, 1e-15);
  EXPECT_NEAR(w(1, 0).real(), 0.8, 1e-15);
}

TEST(BuildW, TwistedSlots) {
  const TruncatedPairSpace sp{1, 2};
  const Complex i(0.0, 1.0);
  const ComplexMatrix w = build_W(scalar(0.0), scalar(i), true, sp);
  EXPECT_NEAR(std::abs(w(3, 1) - i), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(w(4, 2) + 1.0), 0.0, 1e-15);
}

TEST(BuildW, IsometricOnInterior) {
  Rng rng(31);
  const TruncatedPairSpace sp{3, 4};
  const ComplexMatrix w = build_W(random_contraction(rng, 3, 0.9), random_unitary(rng, 3), true, sp);
  const Eigen::Index cols = sp.slot_offset(sp.slot_count() - 2);
  const ComplexMatrix x = w.leftCols(cols);
  EXPECT_LE((x.adjoint() * x - identity(cols)).norm(), 1e-12);
}

TEST(BuildRP, DiagonalQ) {
  ComplexMatrix q = ComplexMatrix::Zero(2, 2);
  q.diagonal() << 1.0, -1.0;
  const auto [r, p] = build_R_P(q);
  for (int s = 0; s < 4; ++s) {
    EXPECT_EQ(r.block(2 * s, 2 * s, 2, 2), q);
    EXPECT_EQ(p.block(2 * s, 2 * s, 2, 2), s % 2 == 0 ? identity(2) : q);
  }
  EXPECT_EQ(r.block(0, 2, 2, 2), ComplexMatrix::Zero(2, 2));
}

TEST(GapUnitary, ZeroPair) {
  const QPair pair{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2), identity(2), Variant::Left};
  const auto [a, b] = gap_columns(pair);
  EXPECT_EQ(a.middleRows(4, 2), identity(2));
  EXPECT_EQ(a, b);
  const ComplexMatrix g = build_gap_unitary(pair);
  EXPECT_LE((g * a - b).norm(), 1e-14);
  EXPECT_LE((g.adjoint() * g - identity(8)).norm(), 1e-14);
}

TEST(GapUnitary, UnitaryFirstZeroSecond) {
  Rng rng(32);
  const ComplexMatrix u = random_unitary(rng, 2);
  const QPair pair{u, ComplexMatrix::Zero(2, 2), identity(2), Variant::Left};
  const auto [a, b] = gap_columns(pair);
  // A h = (0, 0, h, 0) and B h = (T1 h, 0, 0, 0)
  EXPECT_LE((a.middleRows(4, 2) - identity(2)).norm(), 1e-14);
  EXPECT_LE((b.topRows(2) - u).norm(), 1e-14);
  EXPECT_LE(b.bottomRows(6).norm(), 1e-14);
  const ComplexMatrix g = build_gap_unitary(pair);
  EXPECT_LE((g.block(0, 4, 2, 2) - u).norm(), 1e-13);
}

TEST(GapUnitary, GramIdentityAllVariants) {
  for (Variant v : {Variant::Left, Variant::Middle, Variant::Right}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const QPair pair = random_pair(v, 3, seed);
      const auto [a, b] = gap_columns(pair);
      EXPECT_LE((a.adjoint() * a - b.adjoint() * b).norm(), 1e-10) << to_string(v);
      const ComplexMatrix g = build_gap_unitary(pair);
      EXPECT_LE((g * a - b).norm(), 1e-10);
      EXPECT_LE((g.adjoint() * g - identity(12)).norm(), 1e-12);
    }
  }
}

TEST(Correctors, BlockStructure) {
  Rng rng(33);
  const ComplexMatrix q = random_unitary(rng, 2);
  const ComplexMatrix g = random_unitary(rng, 8);
  const auto [r, p] = build_R_P(q);
  const TruncatedPairSpace sp{2, 3};
  const auto [c1, c2] = build_correctors(g, r, p, sp);
  EXPECT_EQ(c1.topLeftCorner(2, 2), identity(2));
  EXPECT_LE((c1.block(sp.block_offset(0), sp.block_offset(0), 8, 8) - g).norm(), 1e-14);
  EXPECT_LE((c2.block(sp.block_offset(0), sp.block_offset(0), 8, 8) - g * p).norm(), 1e-14);
  const ComplexMatrix r3 = r.adjoint() * r.adjoint() * r.adjoint();
  EXPECT_LE((c1.block(sp.block_offset(1), sp.block_offset(1), 8, 8) - g * r3).norm(), 1e-13);
  EXPECT_LE((c2.block(sp.block_offset(2), sp.block_offset(2), 8, 8) - g * r * r * p).norm(), 1e-13);
  EXPECT_LE((c1.adjoint() * c1 - identity(c1.rows())).norm(), 1e-12);
}

TEST(Assemble, ZeroPair) {
  const QPair pair{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2), identity(2), Variant::Left};
  const PairDilation d = assemble_dilation(pair, 3);
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; a + b <= 3; ++b) {
      const ComplexMatrix expected = a + b == 0 ? identity(2) : ComplexMatrix::Zero(2, 2);
      EXPECT_LE((compressed_word(d, a, b) - expected).norm(), 1e-14);
    }
  }
}

TEST(Assemble, ClockShiftAgainstDirectProducts) {
  const QPair pair = as_qpair(gen_clock_shift(3, 0.7));
  const PairDilation d = assemble_dilation(pair, 5);
  for (int a = 0; a <= 5; ++a) {
    for (int b = 0; a + b <= 5; ++b) {
      const ComplexMatrix direct = oracle::power(pair.t1, a) * oracle::power(pair.t2, b);
      EXPECT_LE((compressed_word(d, a, b) - direct).norm(), 1e-10) << a << "," << b;
    }
  }
  const PairDilationReport r = verify_pair_dilation(d, pair, 5);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.relation_residual, 1e-10);
}

TEST(Assemble, CoextensionAndRelationAllVariants) {
  for (Variant v : {Variant::Left, Variant::Middle, Variant::Right}) {
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
      const QPair pair = random_pair(v, 3, seed);
      const PairDilation d = assemble_dilation(pair, 4);
      const TruncatedPairSpace& sp = d.space;
      EXPECT_LE((slot_block(d.v1.adjoint(), sp, 0, 0) - pair.t1.adjoint()).norm(), 1e-12);
      EXPECT_LE((slot_block(d.v2.adjoint(), sp, 0, 0) - pair.t2.adjoint()).norm(), 1e-12);
      // V* on H stays in H
      EXPECT_LE(d.v1.adjoint().block(sp.h_dim, 0, sp.dim() - sp.h_dim, sp.h_dim).norm(), 1e-12);

      const Eigen::Index cols = sp.h_dim * static_cast<Eigen::Index>(sp.interior_slots());
      const ComplexMatrix x = ComplexMatrix::Identity(sp.dim(), cols);
      ComplexMatrix rel;
      if (v == Variant::Left) rel = d.v1 * d.v2 * x - d.q_tilde * d.v2 * d.v1 * x;
      if (v == Variant::Middle) rel = d.v1 * d.v2 * x - d.v2 * d.q_tilde * d.v1 * x;
      if (v == Variant::Right) rel = d.v1 * d.v2 * x - d.v2 * d.v1 * d.q_tilde * x;
      EXPECT_LE(rel.norm(), 1e-10) << to_string(v);
      EXPECT_LE(((d.v1.adjoint() * d.v1 - identity(sp.dim())) * x).norm(), 1e-12);
      EXPECT_LE(((d.v2.adjoint() * d.v2 - identity(sp.dim())) * x).norm(), 1e-12);
      EXPECT_LE((d.q_tilde.adjoint() * d.q_tilde - identity(sp.dim())).norm(), 1e-12);
      EXPECT_LE((slot_block(d.q_tilde, sp, 0, 0) - pair.q).norm(), 1e-14);

      const PairDilationReport r = verify_pair_dilation(d, pair, 4);
      EXPECT_TRUE(r.passed) << to_string(v) << " seed " << seed;
      EXPECT_TRUE(r.qtilde_block_structure);
      EXPECT_TRUE(r.truncation_exact);
    }
  }
}

TEST(Assemble, QTildeBlockDiagonalForLeftAndRight) {
  for (Variant v : {Variant::Left, Variant::Right}) {
    const QPair pair = random_pair(v, 2, 40);
    const PairDilation d = assemble_dilation(pair, 3);
    for (std::size_t s = 0; s < d.space.slot_count(); ++s) {
      EXPECT_EQ(slot_block(d.q_tilde, d.space, s, s), pair.q);
    }
  }
}

TEST(Assemble, RejectsInvalidPair) {
  Rng rng(34);
  const QPair pair{random_contraction(rng, 3, 0.9), random_contraction(rng, 3, 0.9), identity(3),
                   Variant::Left};
  try {
    assemble_dilation(pair, 3);
    FAIL() << "expected RelationViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RelationViolated);
  }
}

TEST(Assemble, RejectsNonContraction) {
  const QPair pair{2.0 * identity(2), identity(2), identity(2), Variant::Left};
  EXPECT_THROW(assemble_dilation(pair, 2), Error);
}
