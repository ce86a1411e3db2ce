#include "gaugeforms/presymplectic.hpp"

#include <gtest/gtest.h>

#include "gaugeforms/convergence.hpp"
#include "gaugeforms/fields.hpp"

namespace gaugeforms {
namespace {

const cplx I(0.0, 1.0);

template <int N>
FormField<N> smooth(const Mesh& mesh, int degree, std::uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  return SmoothField<N>(mesh, degree, rng, amp).sample(mesh);
}

bool converges(const std::vector<double>& res, const std::vector<double>& h, double min_order) {
  const OrderEstimate e = estimate_order(res, h);
  return e.saturated || *e.order >= min_order;
}

std::string show(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += std::to_string(x) + " ";
  return s;
}

TEST(Omega, ConstantCartanExample) {
  // a = fX dx, b = gX dy, A = hX dz with X = i·diag(1,1,−2): (ab − ba)A =
  // 2fgh X³ and tr X³ = 6i.
  const Mesh mesh = Mesh::torus(3, 4);
  Mat<3> x = Mat<3>::Zero();
  x(0, 0) = I;
  x(1, 1) = I;
  x(2, 2) = -2.0 * I;
  const double f = 0.7, g = -1.1, h = 0.4;
  const Mat<3> z = Mat<3>::Zero();
  const FormField<3> a = constant_form<3>(mesh, 1, {Mat<3>(f * x), z, z});
  const FormField<3> b = constant_form<3>(mesh, 1, {z, Mat<3>(g * x), z});
  const Connection<3> A(constant_form<3>(mesh, 1, {z, z, Mat<3>(h * x)}));
  const cplx expected = -constants::q * 2.0 * f * g * h * cplx(0.0, 6.0);
  EXPECT_LE(std::abs(omega(A, a, b) - expected), 1e-16);
}

TEST(Omega, AntisymmetricAndImaginary) {
  const Mesh mesh = Mesh::torus(3, 6);
  const Connection<3> A(smooth<3>(mesh, 1, 1));
  const FormField<3> a = smooth<3>(mesh, 1, 2), b = smooth<3>(mesh, 1, 3);
  EXPECT_EQ(omega(A, a, b), -omega(A, b, a));
  EXPECT_EQ(omega(A, a, a), cplx(0.0));
  EXPECT_EQ(omega(Connection<3>::zero(mesh), a, b), cplx(0.0));
  EXPECT_LE(std::abs(omega(A, a, b).real()), 1e-10 * std::abs(omega(A, a, b)));
  EXPECT_GT(std::abs(omega(A, a, b)), 1e-8);
}

TEST(Kappa, TotalAntisymmetryAndCyclicity) {
  const Mesh mesh = Mesh::torus(3, 6);
  const FormField<3> a = smooth<3>(mesh, 1, 4), b = smooth<3>(mesh, 1, 5), c = smooth<3>(mesh, 1, 6);
  const cplx k = kappa(a, b, c);
  EXPECT_GT(std::abs(k), 1e-8);
  EXPECT_LE(std::abs(kappa(b, c, a) - k), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(kappa(c, a, b) - k), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(kappa(b, a, c) + k), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(kappa(a, c, b) + k), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(kappa(a, a, c)), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(kappa(a, b, b)), 1e-12 * std::abs(k));
  EXPECT_LE(std::abs(k.real()), 1e-10 * std::abs(k));
}

TEST(Kappa, ConjugationInvariant) {
  const Mesh mesh = Mesh::torus(3, 5);
  const FormField<3> a = smooth<3>(mesh, 1, 7), b = smooth<3>(mesh, 1, 8), c = smooth<3>(mesh, 1, 9);
  const Mat<3> g = su_exponential<3>(random_alg<3>(10, 1.0));
  const auto conj = [&](FormField<3> f) {
    for (auto& v : f.data()) v = g.adjoint() * v * g;
    return f;
  };
  EXPECT_LE(std::abs(kappa(conj(a), conj(b), conj(c)) - kappa(a, b, c)), 1e-12 * std::abs(kappa(a, b, c)));
}

TEST(Kappa, ConstantCartanDirectionsAreNotZero) {
  // Constant diagonal a = X dx, b = Y dy, c = Z dz at A = 0 on T³:
  // κ = −3q tr((XY + YX)Z).
  const Mesh mesh = Mesh::torus(3, 4);
  const auto diag = [](double p, double q) {
    Mat<3> m = Mat<3>::Zero();
    m(0, 0) = cplx(0.0, p);
    m(1, 1) = cplx(0.0, q);
    m(2, 2) = cplx(0.0, -p - q);
    return m;
  };
  const Mat<3> x = diag(1.0, 0.5), y = diag(-0.3, 0.8), z = diag(0.6, -1.2), o = Mat<3>::Zero();
  const cplx expected = -3.0 * constants::q * ((x * y + y * x) * z).trace();
  const cplx k = kappa(constant_form<3>(mesh, 1, {x, o, o}), constant_form<3>(mesh, 1, {o, y, o}),
                       constant_form<3>(mesh, 1, {o, o, z}));
  EXPECT_LE(std::abs(k - expected), 1e-16);
  EXPECT_GT(std::abs(k), 1e-4);
}

TEST(Su2, AllStructuresVanish) {
  const Mesh m3 = Mesh::torus(3, 6), m4 = Mesh::cylinder(4, 4);
  const Connection<2> A(smooth<2>(m3, 1, 11));
  const FormField<2> a = smooth<2>(m3, 1, 12), b = smooth<2>(m3, 1, 13), c = smooth<2>(m3, 1, 14);
  EXPECT_LE(std::abs(omega(A, a, b)), 1e-12);
  EXPECT_LE(std::abs(kappa(a, b, c)), 1e-12);
  const Connection<2> B(smooth<2>(m4, 1, 15));
  EXPECT_LE(std::abs(sigma_cs(B, smooth<2>(m4, 1, 16), smooth<2>(m4, 1, 17))), 1e-12);
}

TEST(VariationalD, AnalyticOmegaVariationIsKappa) {
  const Mesh mesh = Mesh::torus(3, 6);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const FormField<3> a = smooth<3>(mesh, 1, 20 + s), b = smooth<3>(mesh, 1, 30 + s), c = smooth<3>(mesh, 1, 40 + s);
    EXPECT_LE(std::abs(omega_variation(a, b, c) - kappa(a, b, c)), 1e-12 * std::max(1.0, std::abs(kappa(a, b, c))));
  }
}

TEST(VariationalD, FiniteDifferenceOfOmegaIsKappa) {
  const Mesh mesh = Mesh::torus(3, 6);
  const Connection<3> A(smooth<3>(mesh, 1, 50));
  const FormField<3> a = smooth<3>(mesh, 1, 51), b = smooth<3>(mesh, 1, 52), c = smooth<3>(mesh, 1, 53);
  const auto phi = [](const Connection<3>& x, const FormField<3>& u, const FormField<3>& v) { return omega(x, u, v); };
  const FdValue d = variational_d2<3>(phi, A, a, b, c);
  EXPECT_LE(std::abs(d.extrapolated - kappa(a, b, c)), 1e-10);
  EXPECT_LE(std::abs(d.raw - kappa(a, b, c)), 1e-10);
}

TEST(VariationalD, ConstantFunctionalIsZero) {
  const Mesh mesh = Mesh::torus(3, 4);
  const Connection<3> A(smooth<3>(mesh, 1, 54));
  const FormField<3> a = smooth<3>(mesh, 1, 55);
  const auto phi = [](const Connection<3>&, const FormField<3>&, const FormField<3>&) { return cplx(0.3, 0.1); };
  EXPECT_EQ(std::abs(variational_d2<3>(phi, A, a, a, a).extrapolated), 0.0);
}

TEST(SigmaCs, Examples) {
  const Mesh mesh = Mesh::torus(4, 4);
  const Connection<3> A(smooth<3>(mesh, 1, 60));
  const FormField<3> a = smooth<3>(mesh, 1, 61), b = smooth<3>(mesh, 1, 62);
  EXPECT_EQ(sigma_cs(A, a, a), cplx(0.0));
  EXPECT_EQ(sigma_cs(A, a, b), -sigma_cs(A, b, a));
  EXPECT_LE(std::abs(sigma_cs(A, a, b).real()), 1e-10 * std::abs(sigma_cs(A, a, b)));
  Mat<3> h = Mat<3>::Zero();
  h(0, 0) = I;
  h(1, 1) = -I;
  const Connection<3> flat(constant_form<3>(mesh, 1, {h, 2.0 * h, -h, h}));
  EXPECT_LE(std::abs(sigma_cs(flat, a, b)), 1e-12);
}

TEST(SigmaCs, ClosedOnTorusConverges) {
  std::vector<double> res, h;
  for (int c : {8, 12, 16}) {
    const Mesh mesh = Mesh::torus(4, c, 4);
    const Connection<3> A(smooth<3>(mesh, 1, 70));
    const FormField<3> a = smooth<3>(mesh, 1, 71), b = smooth<3>(mesh, 1, 72), cc = smooth<3>(mesh, 1, 73);
    const auto phi = [](const Connection<3>& x, const FormField<3>& u, const FormField<3>& v) {
      return sigma_cs(x, u, v);
    };
    res.push_back(std::abs(variational_d2<3>(phi, A, a, b, cc).extrapolated));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_TRUE(converges(res, h, 1.9)) << show(res);
}

TEST(SigmaCs, GaugeInvarianceConverges) {
  std::vector<double> res, h;
  for (int c : {8, 12, 16}) {
    const Mesh mesh = Mesh::cylinder(4, c, 4);
    const Connection<3> A(smooth<3>(mesh, 1, 80));
    const FormField<3> a = smooth<3>(mesh, 1, 81), b = smooth<3>(mesh, 1, 82);
    Rng rng(83);
    SmoothField<3> eta(mesh, 0, rng, 1.0);
    eta.set_interval_factor({0.0, 4.0, -4.0});
    const GaugeMap<3> g = exp_map(eta.sample(mesh));
    const auto conj = [&](FormField<3> f) {
      for (std::size_t n = 0; n < mesh.node_count(); ++n)
        for (int k = 0; k < f.components(); ++k) f.at(n, k) = g.at(n).adjoint() * f.at(n, k) * g.at(n);
      return f;
    };
    EXPECT_GT(std::abs(sigma_cs(A, a, b)), 1e-8);
    res.push_back(std::abs(sigma_cs(gauge_transform(A, g), conj(a), conj(b)) - sigma_cs(A, a, b)));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_TRUE(converges(res, h, 1.9)) << show(res);
}

struct FlatData {
  Connection<3> A;
  FormField<3> xi, a, b, c;
};

FlatData flat_data(int count, int order = 4) {
  const Mesh mesh = Mesh::torus(3, count, order);
  FlatData d{pure_gauge(exp_map(smooth<3>(mesh, 0, 90, 0.5))), smooth<3>(mesh, 0, 91), {}, {}, {}};
  d.a = covariant_d(d.A, smooth<3>(mesh, 0, 92));
  d.b = covariant_d(d.A, smooth<3>(mesh, 0, 93));
  d.c = covariant_d(d.A, smooth<3>(mesh, 0, 94));
  return d;
}

TEST(LieDerivative, FlatDataConverges) {
  std::vector<double> ik, ld, ks, h;
  for (int c : {8, 16, 32}) {
    const FlatData d = flat_data(c);
    ik.push_back(std::abs(inner_kappa(d.A, d.xi, d.a, d.b)));
    ld.push_back(std::abs(lie_derivative_omega(d.A, d.xi, d.a, d.b)));
    ks.push_back(kappa_flat_sector_check(d.A, d.a, d.b, d.c));
    h.push_back(1.0 / c);
  }
  EXPECT_TRUE(converges(ik, h, 1.9)) << show(ik);
  EXPECT_TRUE(converges(ld, h, 1.9)) << show(ld);
  EXPECT_TRUE(converges(ks, h, 1.9)) << show(ks);
}

TEST(LieDerivative, CartanAssemblyMatchesDirect) {
  const FlatData d = flat_data(12);
  const LieDerivativeParts p = lie_derivative_parts(d.A, d.xi, d.a, d.b);
  EXPECT_LE(std::abs(p.cartan - p.direct), 1e-15);
  // The term from moving the frame v = d_Aξ with A does not vanish.
  EXPECT_GT(std::abs(p.moving_frame), 1e2 * std::abs(p.cartan));
}

TEST(LieDerivative, ZeroConnectionConstantDirections) {
  const Mesh mesh = Mesh::torus(3, 8);
  Rng rng(100);
  const FormField<3> a = random_constant_form<3>(mesh, 1, rng), b = random_constant_form<3>(mesh, 1, rng);
  const FormField<3> xi = smooth<3>(mesh, 0, 101);
  const Connection<3> zero = Connection<3>::zero(mesh);
  EXPECT_LE(std::abs(lie_derivative_omega(zero, xi, a, b)), 1e-12);
  EXPECT_LE(std::abs(inner_kappa(zero, xi, a, b)), 1e-12);
  EXPECT_EQ(inner_kappa(zero, FormField<3>(mesh, 0), a, b), cplx(0.0));
}

TEST(LieDerivative, RejectsNonFlatInput) {
  const Mesh mesh = Mesh::torus(3, 8);
  const Connection<3> A(smooth<3>(mesh, 1, 110));
  const FormField<3> a = smooth<3>(mesh, 1, 111), xi = smooth<3>(mesh, 0, 112);
  EXPECT_THROW(inner_kappa(A, xi, a, a), PreconditionError);
  EXPECT_THROW(inner_kappa(Connection<3>::zero(mesh), xi, a, a), PreconditionError);
}

TEST(Contraction, FlatClosedFormConverges) {
  std::vector<double> res, h;
  for (int c : {8, 16, 32}) {
    const FlatData d = flat_data(c);
    res.push_back(std::abs(contraction_omega(d.A, d.xi, d.a) - contraction_omega_flat_form(d.A, d.xi, d.a)));
    h.push_back(1.0 / c);
  }
  EXPECT_TRUE(converges(res, h, 1.9)) << show(res);
}

TEST(MomentPhi, ExamplesAndPreconditions) {
  const Mesh mesh = Mesh::cylinder(4, 5);
  const Connection<3> A(smooth<3>(mesh, 1, 120));
  Rng rng(121);
  SmoothField<3> f(mesh, 0, rng);
  f.set_interval_factor({0.0, 1.0, -1.0});
  const FormField<3> xi = f.sample(mesh);
  EXPECT_THROW(moment_phi(A, smooth<3>(mesh, 0, 122)), PreconditionError);
  EXPECT_LE(std::abs(moment_phi(Connection<3>::zero(mesh), xi)), 1e-14);
  const cplx lhs = moment_phi(A, 2.0 * xi);
  EXPECT_LE(std::abs(lhs - 2.0 * moment_phi(A, xi)), 1e-12 * std::abs(lhs));
  const FdValue fd = fd_derivative([&](double t) { return moment_phi(A.shifted(t, smooth<3>(mesh, 1, 123)), xi); }, 1e-3);
  EXPECT_LE(std::abs(fd.extrapolated - moment_phi_derivative(A, xi, smooth<3>(mesh, 1, 123))), 1e-12);
}

TEST(MomentPhi, HamiltonianResidualConverges) {
  // Measured: d̃Φ^ξ(a) = −σ^cs(d_Aξ, a) with this σ^cs.
  std::vector<double> res, h;
  for (int c : {8, 12, 16}) {
    const Mesh mesh = Mesh::cylinder(4, c, 4);
    const Connection<3> A(smooth<3>(mesh, 1, 130));
    Rng rng(131);
    SmoothField<3> f(mesh, 0, rng);
    f.set_interval_factor({0.0, 1.0, -1.0});
    const FormField<3> xi = f.sample(mesh);
    const FormField<3> a = smooth<3>(mesh, 1, 132);
    res.push_back(std::abs(moment_phi_derivative(A, xi, a) + sigma_cs(A, infinitesimal_action(A, xi), a)));
    h.push_back(mesh.spacing(0));
  }
  EXPECT_TRUE(converges(res, h, 1.9)) << show(res);
}

TEST(BoundaryMatch, FlatExtensionConverges) {
  std::vector<double> res, h;
  for (int c : {8, 12, 16}) {
    const Mesh slice = Mesh::torus(3, c, 4);
    const Connection<3> A = flat_extend_exp(smooth<3>(slice, 0, 140, 0.5), c);
    const FormField<3> a = covariant_d(A, smooth<3>(A.mesh(), 0, 141));
    const FormField<3> b = covariant_d(A, smooth<3>(A.mesh(), 0, 142));
    res.push_back(boundary_omega_match(A, a, b));
    h.push_back(1.0 / c);
  }
  EXPECT_TRUE(converges(res, h, 1.9)) << show(res);
}

TEST(BoundaryMatch, TrivialCases) {
  const Mesh mesh = Mesh::cylinder(4, 4);
  const Connection<3> zero = Connection<3>::zero(mesh);
  const FormField<3> a = smooth<3>(mesh, 1, 150), b = smooth<3>(mesh, 1, 151);
  EXPECT_EQ(sigma_cs(zero, a, b), cplx(0.0));
  EXPECT_EQ(boundary_omega_match(zero, a, b), 0.0);
  const Connection<2> z2 = Connection<2>::zero(mesh);
  EXPECT_LE(boundary_omega_match(z2, smooth<2>(mesh, 1, 152), smooth<2>(mesh, 1, 153)), 1e-12);
}

}  // namespace
}  // namespace gaugeforms
