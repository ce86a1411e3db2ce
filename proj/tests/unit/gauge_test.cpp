#include "gaugeforms/gauge.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "gaugeforms/convergence.hpp"
#include "gaugeforms/fields.hpp"

namespace gaugeforms {
namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

template <int N>
Connection<N> smooth_connection(const Mesh& mesh, std::uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  return Connection<N>(SmoothField<N>(mesh, 1, rng, amp).sample(mesh));
}

template <int N>
FormField<N> smooth_function(const Mesh& mesh, std::uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  return SmoothField<N>(mesh, 0, rng, amp).sample(mesh);
}

TEST(Curvature, CommutingConstantConnectionIsFlat) {
  const Mesh mesh = Mesh::torus(3, 6);
  Mat<3> h = Mat<3>::Zero();
  h(0, 0) = I;
  h(1, 1) = -I;
  Mat<3> k = Mat<3>::Zero();
  k(1, 1) = 2.0 * I;
  k(2, 2) = -2.0 * I;
  const Connection<3> a(constant_form<3>(mesh, 1, {h, 0.5 * k, -h}));
  EXPECT_LE(max_abs(curvature(a)), 1e-14);
  EXPECT_LE(flatness_residual(a), 1e-14);
}

TEST(Curvature, ConstantConnectionGivesCommutator) {
  const Mesh mesh = Mesh::torus(2, 5);
  Rng rng(4);
  const Mat<2> x = random_alg<2>(rng, 1.0), y = random_alg<2>(rng, 1.0);
  const Connection<2> a(constant_form<2>(mesh, 1, {x, y}));
  const FormField<2> f = curvature(a);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) EXPECT_LE((f.at(n, 0) - commutator<2>(x, y)).norm(), 1e-14);
}

TEST(Curvature, AbelianModeConverges) {
  // A = sin(2πx) X dy, F = 2π cos(2πx) X dx∧dy.
  const Mat<2> x = su_basis<2>()[2];
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(2, c);
    const Connection<2> a(sample<2>(mesh, 1, [&](const auto& p, int comp) {
      return comp == 1 ? Mat<2>(std::sin(2 * kPi * p[0]) * x) : Mat<2>(Mat<2>::Zero());
    }));
    const FormField<2> exact =
        sample<2>(mesh, 2, [&](const auto& p, int) { return Mat<2>(2 * kPi * std::cos(2 * kPi * p[0]) * x); });
    res.push_back(max_abs(curvature(a) - exact));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(GaugeAction, ConstantGaugeConjugates) {
  const Mesh mesh = Mesh::torus(3, 5);
  const Connection<3> a = smooth_connection<3>(mesh, 11);
  const Mat<3> g = su_exponential<3>(random_alg<3>(12, 1.0));
  const GaugeMap<3> gm(mesh, std::vector<Mat<3>>(mesh.node_count(), g));
  const Connection<3> b = gauge_transform(a, gm);
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    for (int i = 0; i < 3; ++i)
      EXPECT_LE((b.form().at(n, i) - g.adjoint() * a.form().at(n, i) * g).norm(), 1e-13);
}

TEST(GaugeAction, CurvatureCovarianceConverges) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(3, c);
    const Connection<2> a = smooth_connection<2>(mesh, 21);
    const GaugeMap<2> g = exp_map(smooth_function<2>(mesh, 22, 1.0));
    const FormField<2> lhs = curvature(gauge_transform(a, g));
    FormField<2> rhs = curvature(a);
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
      for (int k = 0; k < 3; ++k) rhs.at(n, k) = g.at(n).adjoint() * rhs.at(n, k) * g.at(n);
    res.push_back(max_abs(lhs - rhs));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(GaugeAction, GroupLawConverges) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(3, c);
    const Connection<2> a = smooth_connection<2>(mesh, 31);
    const GaugeMap<2> g = exp_map(smooth_function<2>(mesh, 32, 1.0));
    const GaugeMap<2> f = exp_map(smooth_function<2>(mesh, 33, 1.0));
    const Connection<2> twice = gauge_transform(gauge_transform(a, g), f);
    const Connection<2> once = gauge_transform(a, compose(g, f));
    res.push_back(max_abs(twice.form() - once.form()));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(GaugeAction, InfinitesimalActionMatchesDerivative) {
  const Mesh mesh = Mesh::torus(3, 8);
  const Connection<3> a = smooth_connection<3>(mesh, 41);
  const FormField<3> xi = smooth_function<3>(mesh, 42);
  const double eps = 1e-4;
  const Connection<3> plus = gauge_transform(a, exp_map(eps * xi));
  const Connection<3> minus = gauge_transform(a, exp_map(-eps * xi));
  const FormField<3> fd = (1.0 / (2 * eps)) * (plus.form() - minus.form());
  // The discrete g⁻¹dg only matches dξ to O(ε²) plus roundoff/ε.
  EXPECT_LE(max_abs(fd - infinitesimal_action(a, xi)), 1e-7);
}

TEST(CovariantD, ZeroConnectionIsExteriorDerivative) {
  const Mesh mesh = Mesh::cylinder(3, 6);
  const Connection<2> zero = Connection<2>::zero(mesh);
  for (int p = 0; p < 3; ++p) {
    Rng rng(50 + p);
    const FormField<2> w = SmoothField<2>(mesh, p, rng).sample(mesh);
    EXPECT_EQ(max_abs(covariant_d(zero, w) - exterior_d(w)), 0.0);
  }
}

TEST(CovariantD, ZeroFormUsesCommutator) {
  const Mesh mesh = Mesh::torus(3, 6);
  const Connection<3> a = smooth_connection<3>(mesh, 61);
  const FormField<3> xi = smooth_function<3>(mesh, 62);
  FormField<3> direct = exterior_d(xi);
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    for (int i = 0; i < 3; ++i) direct.at(n, i) += commutator<3>(a.form().at(n, i), xi.at(n, 0));
  EXPECT_LE(max_abs(covariant_d(a, xi) - direct), 1e-14);
}

TEST(CovariantD, CodifferentialIsExactAdjoint) {
  for (const Mesh& mesh : {Mesh::torus(3, 6, 4), Mesh::cylinder(3, 6), Mesh::cylinder(4, 4)}) {
    const Connection<3> a = smooth_connection<3>(mesh, 71);
    for (int p = 0; p < mesh.dim(); ++p) {
      Rng r1(72 + p), r2(82 + p);
      const FormField<3> alpha = SmoothField<3>(mesh, p, r1).sample(mesh);
      const FormField<3> beta = SmoothField<3>(mesh, p + 1, r2).sample(mesh);
      const cplx lhs = l2_inner(covariant_d(a, alpha), beta);
      const cplx rhs = l2_inner(alpha, covariant_codifferential(a, beta));
      EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs))) << mesh.describe() << " p=" << p;
    }
  }
}

TEST(CovariantD, BianchiConverges) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(3, c);
    const Connection<2> a = smooth_connection<2>(mesh, 91);
    res.push_back(max_abs(covariant_d(a, curvature(a))));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(CovariantD, SquareIsCurvatureBracketConverges) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(3, c);
    const Connection<2> a = smooth_connection<2>(mesh, 101);
    const FormField<2> xi = smooth_function<2>(mesh, 102);
    const FormField<2> lhs = covariant_d(a, covariant_d(a, xi));
    const FormField<2> rhs = graded_commutator(curvature(a), xi);
    res.push_back(max_abs(lhs - rhs));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(PureGauge, IdentityGivesZero) {
  const Mesh mesh = Mesh::cylinder(3, 5);
  EXPECT_EQ(max_abs(pure_gauge(GaugeMap<3>::identity(mesh)).form()), 0.0);
}

TEST(PureGauge, FlatnessConverges) {
  for (int order : {2, 4}) {
    std::vector<double> res, h;
    for (int c : {16, 24, 32}) {
      const Mesh mesh = Mesh::torus(3, c, order);
      res.push_back(flatness_residual(pure_gauge(exp_map(smooth_function<2>(mesh, 111, 1.0)))));
      h.push_back(mesh.spacing(0));
    }
    EXPECT_GE(*estimate_order(res, h).order, order == 2 ? 1.9 : 3.5);
  }
}

TEST(PureGauge, ProjectionIsAudited) {
  const Mesh mesh = Mesh::torus(3, 8);
  ProjectionAudit::reset();
  pure_gauge(exp_map(smooth_function<2>(mesh, 121, 1.0)));
  const double coarse = ProjectionAudit::max_distance();
  EXPECT_GT(coarse, 1e-8);
  ProjectionAudit::reset();
  pure_gauge(exp_map(smooth_function<2>(Mesh::torus(3, 32), 121, 1.0)));
  EXPECT_LT(ProjectionAudit::max_distance(), coarse / 8);
}

TEST(GaugeMap, RejectsNonUnitaryValues) {
  const Mesh mesh = Mesh::torus(2, 4);
  std::vector<Mat<2>> v(mesh.node_count(), Mat<2>::Identity());
  v[3] *= 1.01;
  EXPECT_THROW(GaugeMap<2>(mesh, v), PreconditionError);
  v[3] = Mat<2>::Identity();
  EXPECT_TRUE(GaugeMap<2>(mesh, v).based());
}

TEST(GaugeMap, ComposeIsPointwise) {
  const Mesh mesh = Mesh::torus(2, 4);
  const GaugeMap<3> g = exp_map(smooth_function<3>(mesh, 131, 1.0));
  const GaugeMap<3> f = exp_map(smooth_function<3>(mesh, 132, 1.0));
  const GaugeMap<3> gf = compose(g, f);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) EXPECT_LE((gf.at(n) - g.at(n) * f.at(n)).norm(), 1e-15);
  EXPECT_LE(gf.max_group_defect(), 1e-13);
}

TEST(FlatExtension, RestrictsToZeroAndTarget) {
  const Mesh slice = Mesh::torus(3, 8);
  const FormField<2> xi = smooth_function<2>(slice, 141, 1.0);
  const Connection<2> a = flat_extend_exp(xi, 8);
  EXPECT_EQ(a.mesh().interval_axis(), 0);
  const auto bd = boundary_restrict(a.form());
  ASSERT_EQ(bd.slices.size(), 2u);
  const Connection<2> target = pure_gauge(exp_map(xi));
  for (const auto& s : bd.slices) {
    if (s.position == 0.0)
      EXPECT_EQ(max_abs(s.field), 0.0);
    else
      EXPECT_LE(max_abs(s.field - target.form()), 1e-14);
  }
}

TEST(FlatExtension, FlatnessConverges) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh slice = Mesh::torus(2, c);
    res.push_back(flatness_residual(flat_extend_exp(smooth_function<2>(slice, 151, 1.0), c)));
    h.push_back(1.0 / c);
  }
  EXPECT_GE(*estimate_order(res, h).order, 1.9);
}

TEST(Holonomy, CommutingConstantConnection) {
  const Mesh mesh = Mesh::torus(3, 6);
  Mat<2> h = Mat<2>::Zero();
  h(0, 0) = I;
  h(1, 1) = -I;
  const Connection<2> a(constant_form<2>(mesh, 1, {h, 2.0 * h, -h}));
  for (int s : {1, 2}) EXPECT_LE((loop_holonomy(a, 7, 0, 2, s) - Mat<2>::Identity()).norm(), 1e-14);
}

TEST(Holonomy, PlaquetteApproximatesCurvature) {
  std::vector<double> res, h;
  for (int c : {16, 24, 32}) {
    const Mesh mesh = Mesh::torus(3, c);
    const Connection<2> a = smooth_connection<2>(mesh, 161);
    const FormField<2> f = curvature(a);
    const double hh = mesh.spacing(0);
    double worst = 0.0;
    for (std::size_t n = 0; n < mesh.node_count(); n += 37) {
      const Mat<2> hol = plaquette_holonomy(a, n, 0, 1);
      // Compare against the curvature at the plaquette center.
      const std::size_t nx = mesh.shifted(n, 0, 1), ny = mesh.shifted(n, 1, 1), nxy = mesh.shifted(nx, 1, 1);
      const Mat<2> fc = 0.25 * (f.at(n, 0) + f.at(nx, 0) + f.at(ny, 0) + f.at(nxy, 0));
      worst = std::max(worst, (hol - su_exponential<2>(Mat<2>(-hh * hh * fc))).norm());
    }
    res.push_back(worst);
    h.push_back(hh);
  }
  EXPECT_GE(*estimate_order(res, h).order, 3.5);
}

TEST(Holonomy, PureGaugeLoopIsTrivial) {
  const Mesh mesh = Mesh::cylinder(3, 16);
  const Connection<2> a = pure_gauge(exp_map(smooth_function<2>(mesh, 171, 1.0)));
  const std::size_t node = mesh.node_at({3, 5, 2, 0});
  EXPECT_LE((loop_holonomy(a, node, 0, 1, 2) - Mat<2>::Identity()).norm(), 1e-2);
  EXPECT_THROW(loop_holonomy(a, mesh.node_at({15, 0, 0, 0}), 0, 1, 2), Error);
}

}  // namespace
}  // namespace gaugeforms
