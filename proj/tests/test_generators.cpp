#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qdil/errors.hpp"
#include "qdil/generators.hpp"
#include "qdil/tuple_dilation.hpp"

using namespace qdil;

TEST(ClockShift, Relations) {
  for (Eigen::Index d : {2, 3, 4, 7}) {
    const ComplexMatrix c = clock_matrix(d), s = shift_cycle_matrix(d);
    const Complex w = std::polar(1.0, 2 * std::numbers::pi / static_cast<double>(d));
    EXPECT_LE((c * s - w * s * c).norm(), 1e-14);
    EXPECT_LE((c.adjoint() * c - identity(d)).norm(), 1e-14);
    EXPECT_EQ(oracle::power(s, static_cast<int>(d)), identity(d));
  }
  EXPECT_THROW(gen_clock_shift(1, 1.0), Error);
}

TEST(CompressedRotational, Examples) {
  // one variable, cap 1: the 2x2 Jordan block
  const QTuple j = gen_compressed_rotational(1, 1, 1, 1.0, PhaseMatrix::zero(1));
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(1, 0) = 1.0;
  EXPECT_EQ(j.op(0), expected);

  const QTuple t = gen_compressed_rotational(2, 1, 2, 1.0, PhaseMatrix::uniform(2, std::numbers::pi));
  EXPECT_EQ(t.dim(), 9);
  EXPECT_TRUE(verify_q_tuple(t).passed);
  EXPECT_GE(oracle::min_eig(szego_defect(t)), -1e-12);

  Rng rng(1);
  const QTuple r = gen_compressed_rotational(3, 1, 2, 0.8, random_phases(rng, 3));
  EXPECT_TRUE(brehmer_check(r).passed);
}

TEST(Sylvester, ScalarQ) {
  const Complex q = std::polar(1.0, 0.9);
  for (Variant v : {Variant::Left, Variant::Middle, Variant::Right}) {
    const QPair p = gen_sylvester_qpair(4, v, q * identity(4), 3, 0.95);
    EXPECT_LE((p.t1 * p.t2 - q * p.t2 * p.t1).norm(), 1e-12);
    EXPECT_NEAR(op_norm(p.t1), 0.95, 1e-12);
    EXPECT_NEAR(op_norm(p.t2), 0.95, 1e-12);
  }
}

TEST(Sylvester, DiagonalQMiddle) {
  ComplexMatrix q = ComplexMatrix::Zero(2, 2);
  q.diagonal() << 1.0, -1.0;
  const QPair p = gen_sylvester_qpair(2, Variant::Middle, q, 5, 0.9);
  EXPECT_LE((p.t1 * p.t2 - p.t2 * q * p.t1).norm(), 1e-12);
  EXPECT_GT(p.t1.norm(), 0.1);
}

TEST(Sylvester, OneDimensionalNonTrivialQ) {
  // scalars with q != 1 only q-commute when one of them vanishes
  const ComplexMatrix q = std::polar(1.0, 2.0) * identity(1);
  for (Variant v : {Variant::Left, Variant::Middle, Variant::Right}) {
    const QPair p = gen_sylvester_qpair(1, v, q, 7, 0.8);
    EXPECT_EQ(p.t2(0, 0), Complex(0.0, 0.0));
    EXPECT_NEAR(std::abs(p.t1(0, 0)), 0.8, 1e-12);
    EXPECT_TRUE(verify_q_pair(p).passed);
  }
  const QPair trivial = gen_sylvester_qpair(1, Variant::Left, identity(1), 7, 0.8);
  EXPECT_NEAR(std::abs(trivial.t2(0, 0)), 0.8, 1e-12);
}

TEST(Generate, DeterministicPerSeed) {
  GeneratorSpec spec;
  spec.kind = "sylvester_qpair";
  spec.dim = 3;
  spec.seed = 42;
  spec.scale = 0.9;
  const QPair a = std::get<QPair>(generate(spec));
  const QPair b = std::get<QPair>(generate(spec));
  EXPECT_EQ(a.t1, b.t1);
  EXPECT_EQ(a.t2, b.t2);
  EXPECT_EQ(a.q, b.q);
  spec.seed = 43;
  EXPECT_NE(std::get<QPair>(generate(spec)).t1, a.t1);
}

TEST(Generate, AllKinds) {
  for (const char* kind : {"clock_shift", "compressed_rotational", "scaled_random", "mixed_brehmer"}) {
    GeneratorSpec spec;
    spec.kind = kind;
    spec.seed = 7;
    spec.scale = 0.9;
    const QTuple t = std::get<QTuple>(generate(spec));
    EXPECT_TRUE(verify_q_tuple(t).passed) << kind;
  }
}

TEST(Generate, ScaledRandomIsDoubly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const QTuple t = gen_scaled_random(3, 3, 2, 1.0, seed);
    EXPECT_TRUE(verify_doubly_q(t).passed);
    EXPECT_LE(verify_doubly_q(t).max_star_residual, 1e-13);
  }
}

TEST(Generate, MixedBrehmerStructure) {
  const QTuple t = gen_mixed_brehmer(3, 2, 2, {1}, 1.0, 3);
  EXPECT_LE((t.op(1).adjoint() * t.op(1) - identity(t.dim())).norm(), 1e-12);
  EXPECT_TRUE(brehmer_check(t).passed);
  EXPECT_TRUE(verify_doubly_q(t).passed);
}

TEST(Generate, InvalidSpecs) {
  GeneratorSpec spec;
  spec.kind = "nonsense";
  EXPECT_THROW(spec.validate(), Error);
  spec = GeneratorSpec{};
  spec.scale = 1.5;
  EXPECT_THROW(spec.validate(), Error);
  spec = GeneratorSpec{};
  spec.kind = "sylvester_qpair";
  spec.q_mode = "weird";
  EXPECT_THROW(spec.validate(), Error);
}

TEST(SpecQ, Modes) {
  GeneratorSpec spec;
  spec.dim = 3;
  spec.q_mode = "identity";
  EXPECT_EQ(spec_q(spec), identity(3));
  spec.q_mode = "scalar";
  spec.q_angle = std::numbers::pi;
  EXPECT_LE((spec_q(spec) + identity(3)).norm(), 1e-15);
  spec.q_mode = "haar";
  const ComplexMatrix u = spec_q(spec);
  EXPECT_LE((u.adjoint() * u - identity(3)).norm(), 1e-13);
}
