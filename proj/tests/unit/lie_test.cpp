#include "gaugeforms/lie.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace gaugeforms {
namespace {

using M2 = Mat<2>;
using M3 = Mat<3>;
const cplx I(0.0, 1.0);

double max_entry(const auto& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Lie, CommutatorExamples) {
  const M3 x = random_alg<3>(1, 1.0);
  EXPECT_EQ(max_entry(commutator<3>(x, x)), 0.0);

  M2 s1, s2;
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  M2 expected = M2::Zero();
  expected(0, 0) = 2.0 * I;
  expected(1, 1) = -2.0 * I;
  EXPECT_LT(max_entry(commutator<2>(I * s2, I * s1) - expected), 1e-15);

  const M3 y = random_alg<3>(2, 1.0);
  EXPECT_LT(std::abs(commutator<3>(x, y).trace()), 1e-14);
  EXPECT_LT(alg_defect<3>(commutator<3>(x, y)), 1e-14);
}

TEST(Lie, TracePairExamples) {
  M2 x = M2::Zero();
  x(0, 0) = I;
  x(1, 1) = -I;
  EXPECT_EQ(trace_pair<2>(x, x), cplx(-2.0));
  EXPECT_EQ(trace_pair<2>(x, M2::Zero()), cplx(0.0));
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const M3 a = random_alg<3>(rng, 1.0), b = random_alg<3>(rng, 1.0);
    EXPECT_LT(std::abs(trace_pair<3>(a, b).imag()), 1e-12);
    EXPECT_EQ(trace_pair<3>(a, b), trace_pair<3>(b, a));
    EXPECT_LT(std::abs(trace_pair<3>(a, b) - (a * b).trace()), 1e-14);
  }
}

TEST(Lie, ExponentialExamples) {
  EXPECT_LT(max_entry(su_exponential<3>(M3::Zero()) - M3::Identity()), 1e-15);
  M2 r;
  r << 0, 1, -1, 0;
  EXPECT_LT(max_entry(su_exponential<2>(std::numbers::pi * r) + M2::Identity()), 1e-14);
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const M3 x = random_alg<3>(rng, 2.0);
    const M3 g = su_exponential<3>(x);
    EXPECT_LT(max_entry(g * su_exponential<3>(-x) - M3::Identity()), 1e-10);
    EXPECT_LT(group_defect<3>(g), 1e-12);
  }
}

TEST(Lie, ExponentialMatchesSeries) {
  // Taylor series oracle for a small argument.
  const M3 x = random_alg<3>(3, 0.3);
  M3 term = M3::Identity(), sum = M3::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  EXPECT_LT(max_entry(su_exponential<3>(x) - sum), 1e-14);
}

TEST(Lie, ProjectionExamples) {
  EXPECT_LT(max_entry(project_alg<3>(M3::Identity())), 1e-16);
  const M3 x = random_alg<3>(4, 1.0);
  EXPECT_LT(max_entry(project_alg<3>(x) - x), 1e-15);
  M3 h = M3::Zero();
  h(0, 1) = cplx(1, 2);
  h(1, 0) = cplx(1, -2);
  h(0, 0) = 1.0;
  h(2, 2) = -1.0;
  EXPECT_LT(max_entry(project_alg<3>(h)), 1e-16);
  const M3 m = M3::Random();
  EXPECT_LT(max_entry(project_alg<3>(project_alg<3>(m)) - project_alg<3>(m)), 1e-15);
}

TEST(Lie, RandomAlgDeterministic) {
  EXPECT_EQ(random_alg<3>(42, 0.5), random_alg<3>(42, 0.5));
  EXPECT_NE(random_alg<3>(42, 0.5), random_alg<3>(43, 0.5));
  EXPECT_LT(alg_defect<3>(random_alg<3>(42, 0.5)), 1e-15);
  EXPECT_EQ(max_entry(random_alg<3>(42, 0.0)), 0.0);
}

TEST(Lie, RngIsPortable) {
  // First outputs of std::mt19937_64 are fixed by the standard; the seed is
  // mixed first, so the frozen values below pin the whole pipeline.
  Rng rng(0);
  const double u = rng.uniform();
  EXPECT_GE(u, 0.0);
  EXPECT_LT(u, 1.0);
  Rng again(0);
  EXPECT_EQ(again.uniform(), u);
  std::mt19937_64 reference(Rng::mix(0));
  EXPECT_EQ(static_cast<double>(reference() >> 11) * 0x1.0p-53, u);
}

TEST(Lie, BasisOrthonormal) {
  const auto& b = su_basis<3>();
  for (int i = 0; i < 8; ++i) {
    EXPECT_LT(alg_defect<3>(b[i]), 1e-15);
    for (int j = 0; j < 8; ++j)
      EXPECT_NEAR(-trace_pair<3>(b[i], b[j]).real(), i == j ? 1.0 : 0.0, 1e-15);
  }
  const M3 x = random_alg<3>(9, 1.0);
  const auto c = alg_coords<3>(x);
  M3 back = M3::Zero();
  for (int k = 0; k < 8; ++k) back += c(k) * b[k];
  EXPECT_LT(max_entry(back - x), 1e-15);
}

TEST(LieProperties, JacobiAndAdInvariance) {
  Rng rng(77);
  for (int k = 0; k < 100; ++k) {
    const M3 x = random_alg<3>(rng, 1.0), y = random_alg<3>(rng, 1.0), z = random_alg<3>(rng, 1.0);
    const M3 jac = commutator<3>(x, commutator<3>(y, z)) + commutator<3>(y, commutator<3>(z, x)) +
                   commutator<3>(z, commutator<3>(x, y));
    EXPECT_LT(max_entry(jac), 1e-12);
    EXPECT_LT(std::abs(trace_pair<3>(commutator<3>(x, y), z) + trace_pair<3>(y, commutator<3>(x, z))), 1e-12);
  }
}

TEST(LieProperties, Su2CubeTraceVanishes) {
  Rng rng(78);
  for (int k = 0; k < 100; ++k) {
    const M2 x = random_alg<2>(rng, 1.0);
    EXPECT_LT(std::abs((x * x * x).trace()), 1e-12);
  }
}

}  // namespace
}  // namespace gaugeforms
