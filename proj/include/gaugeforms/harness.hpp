#pragma once

// Registry of named verification checks. Each check evaluates one identity
// on a list of grids and returns per-grid residuals; exact checks compare
// the worst residual with a tolerance, convergent checks fit an order.

#include <chrono>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "gaugeforms/cotangent.hpp"
#include "gaugeforms/degree_oracle.hpp"
#include "gaugeforms/elliptic.hpp"
#include "gaugeforms/fields.hpp"
#include "gaugeforms/functionals.hpp"
#include "gaugeforms/presymplectic.hpp"
#include "gaugeforms/report.hpp"

namespace gaugeforms::harness {

/// Residuals of one check over its grids (or scaling parameters).
struct Measurement {
  std::vector<double> residuals;
  std::vector<double> scales;
  nlohmann::json details = nlohmann::json::object();
};

using Runner = std::function<Measurement(const CheckConfig&, const std::vector<int>&)>;

struct CheckInfo {
  std::string name;
  std::string description;
  std::string anchor;  ///< the statement being verified
  ResidualClass residual_class;
  double threshold;  ///< tolerance (exact) or minimum order (convergent)
  std::optional<double> max_order;
  std::vector<int> default_grids;
  Runner run;
};

namespace checks {

constexpr double pi = std::numbers::pi;

template <class F>
auto with_rank(int n, F&& f) {
  switch (n) {
    case 2:
      return f.template operator()<2>();
    case 3:
      return f.template operator()<3>();
    default:
      throw Error("checks support n = 2 and n = 3, got " + std::to_string(n));
  }
}

template <int N>
FormField<N> field(const Mesh& mesh, int degree, std::uint64_t seed, std::uint64_t stream, double amp = 0.5) {
  Rng rng(seed, stream);
  return SmoothField<N>(mesh, degree, rng, amp).sample(mesh);
}

/// Smooth 0-form vanishing on the boundary slices of a cylinder.
template <int N>
FormField<N> interior_function(const Mesh& mesh, std::uint64_t seed, std::uint64_t stream) {
  Rng rng(seed, stream);
  SmoothField<N> f(mesh, 0, rng);
  f.set_interval_factor({0.0, 1.0, -1.0});
  return f.sample(mesh);
}

inline Mesh box(std::vector<int> counts, bool cylinder, int order) {
  std::vector<Topology> topo(counts.size(), Topology::periodic);
  if (cylinder) topo[0] = Topology::interval;
  return Mesh(std::move(counts), {}, std::move(topo), order);
}

template <int N>
GaugeMap<N> bump_gauge(const Mesh& mesh, const BumpMap& b = {}) {
  return sample_gauge<N>(mesh, [&](const auto& x) { return embed_su2<N>(b(x)); });
}

inline Mat<2> regular_value() {
  const auto& b = su_basis<2>();
  return su_exponential<2>(Mat<2>(1.3 * b[0] + 0.7 * b[1] + 0.4 * b[2]));
}

template <int N>
Mat<N> diagonal_direction(double p, double q) {
  Mat<N> m = Mat<N>::Zero();
  m(0, 0) = cplx(0.0, p);
  m(1, 1) = cplx(0.0, q);
  if constexpr (N > 2) m(2, 2) = cplx(0.0, -p - q);
  else m(1, 1) = cplx(0.0, -p);
  return m;
}

inline double spacing(int count) { return 1.0 / count; }

template <int N>
Connection<N> flat_pure_gauge(const Mesh& mesh, std::uint64_t seed, std::uint64_t stream) {
  return pure_gauge(exp_map(field<N>(mesh, 0, seed, stream, 0.5)));
}

// -- presymplectic ----------------------------------------------------------

inline Measurement su2_vanishing(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Connection<2> A(field<2>(mesh, 1, cfg.seed, 4 * k));
      const FormField<2> a = field<2>(mesh, 1, cfg.seed, 4 * k + 1), b = field<2>(mesh, 1, cfg.seed, 4 * k + 2),
                         cc = field<2>(mesh, 1, cfg.seed, 4 * k + 3);
      worst = std::max({worst, std::abs(omega(A, a, b)), std::abs(kappa(a, b, cc))});
    }
    m.residuals.push_back(worst);
    m.scales.push_back(spacing(c));
  }
  m.details["samples"] = 100;
  return m;
}

template <int N>
Measurement omega_kappa_exact(const CheckConfig& cfg, const std::vector<int>& grids) {
  // Residuals are relative to |κ|.
  Measurement m;
  double fd_gap = 0.0, scale = INFINITY;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
      const Connection<N> A(field<N>(mesh, 1, cfg.seed, 4 * k));
      const FormField<N> a = field<N>(mesh, 1, cfg.seed, 4 * k + 1), b = field<N>(mesh, 1, cfg.seed, 4 * k + 2),
                         cc = field<N>(mesh, 1, cfg.seed, 4 * k + 3);
      const cplx kap = kappa(a, b, cc);
      const double norm = std::max(std::abs(kap), 1e-300);
      scale = std::min(scale, std::abs(kap));
      worst = std::max(worst, std::abs(omega_variation(a, b, cc) - kap) / norm);
      if (k < 3) {
        const auto phi = [](const Connection<N>& x, const FormField<N>& u, const FormField<N>& v) {
          return omega(x, u, v);
        };
        const double gap = std::abs(variational_d2<N>(phi, A, a, b, cc, cfg.fd_step).extrapolated - kap) / norm;
        fd_gap = std::max(fd_gap, gap);
        worst = std::max(worst, gap);
      }
    }
    m.residuals.push_back(worst);
    m.scales.push_back(spacing(c));
  }
  {
    // First sample in the real normalization (value / i), and the variant with coefficient q instead of 3q.
    const Mesh mesh = Mesh::torus(3, grids.front());
    const cplx kap = kappa(field<N>(mesh, 1, cfg.seed, 1), field<N>(mesh, 1, cfg.seed, 2), field<N>(mesh, 1, cfg.seed, 3));
    m.details["kappa_real_normalization"] = (kap / cplx(0.0, 1.0)).real();
    m.details["kappa/3"] = (kap / cplx(0.0, 3.0)).real();
  }
  m.details["samples"] = 50;
  m.details["fd_gap"] = fd_gap;
  m.details["min_abs_kappa"] = scale;
  return m;
}

template <int N>
Measurement sigma_cs_closed(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> raw, scale;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(4, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const FormField<N> a = field<N>(mesh, 1, cfg.seed, 1), b = field<N>(mesh, 1, cfg.seed, 2),
                       cc = field<N>(mesh, 1, cfg.seed, 3);
    const auto phi = [](const Connection<N>& x, const FormField<N>& u, const FormField<N>& v) {
      return sigma_cs(x, u, v);
    };
    const FdValue d = variational_d2<N>(phi, A, a, b, cc, cfg.fd_step);
    m.residuals.push_back(std::abs(d.extrapolated));
    raw.push_back(std::abs(d.raw));
    scale.push_back(std::abs(sigma_cs(A, a, b)));
    m.scales.push_back(spacing(c));
  }
  m.details["raw_fd"] = raw;
  m.details["sigma_ab"] = scale;
  return m;
}

template <int N>
struct FlatTriple {
  Connection<N> A;
  FormField<N> xi, a, b, c;
};

template <int N>
FlatTriple<N> flat_triple(int count, std::uint64_t seed) {
  const Mesh mesh = Mesh::torus(3, count, 4);
  FlatTriple<N> d{flat_pure_gauge<N>(mesh, seed, 0), field<N>(mesh, 0, seed, 1), {}, {}, {}};
  d.a = covariant_d(d.A, field<N>(mesh, 0, seed, 2));
  d.b = covariant_d(d.A, field<N>(mesh, 0, seed, 3));
  d.c = covariant_d(d.A, field<N>(mesh, 0, seed, 4));
  return d;
}

template <int N>
Measurement lie_derivative_lemma(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> ik, ld, mf;
  for (int c : grids) {
    const FlatTriple<N> d = flat_triple<N>(c, cfg.seed);
    ik.push_back(std::abs(inner_kappa(d.A, d.xi, d.a, d.b)));
    ld.push_back(std::abs(lie_derivative_omega(d.A, d.xi, d.a, d.b)));
    mf.push_back(std::abs(lie_derivative_parts(d.A, d.xi, d.a, d.b).moving_frame));
    m.residuals.push_back(std::max(ik.back(), ld.back()));
    m.scales.push_back(spacing(c));
  }
  m.details["inner_kappa"] = ik;
  m.details["lie_derivative"] = ld;
  m.details["moving_frame_term"] = mf;
  return m;
}

template <int N>
Measurement flat_sector_kappa(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const FlatTriple<N> d = flat_triple<N>(c, cfg.seed);
    m.residuals.push_back(kappa_flat_sector_check(d.A, d.a, d.b, d.c));
    m.scales.push_back(spacing(c));
  }
  return m;
}

template <int N>
Measurement moment_phi_hamiltonian(const CheckConfig& cfg, const std::vector<int>& grids) {
  // Measured convention: d̃Φ^ξ(a) = −σ^cs(d_Aξ, a).
  Measurement m;
  std::vector<double> fd_gap;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(4, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const FormField<N> xi = interior_function<N>(mesh, cfg.seed, 1);
    const FormField<N> a = field<N>(mesh, 1, cfg.seed, 2);
    const cplx analytic = moment_phi_derivative(A, xi, a);
    m.residuals.push_back(std::abs(analytic + sigma_cs(A, infinitesimal_action(A, xi), a)));
    const FdValue fd = fd_derivative([&](double t) { return moment_phi(A.shifted(t, a), xi); }, cfg.fd_step);
    fd_gap.push_back(std::abs(fd.extrapolated - analytic));
    m.scales.push_back(spacing(c));
  }
  m.details["fd_gap"] = fd_gap;
  m.details["sign"] = -1;
  return m;
}

template <int N>
Measurement boundary_match(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh slice = Mesh::torus(3, c, 4);
    const Connection<N> A = flat_extend_exp(field<N>(slice, 0, cfg.seed, 0), c);
    const FormField<N> a = covariant_d(A, field<N>(A.mesh(), 0, cfg.seed, 1));
    const FormField<N> b = covariant_d(A, field<N>(A.mesh(), 0, cfg.seed, 2));
    m.residuals.push_back(boundary_omega_match(A, a, b));
    m.scales.push_back(spacing(c));
  }
  return m;
}

template <int N>
Measurement sigma_cs_generating(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(4, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const FormField<N> a = field<N>(mesh, 1, cfg.seed, 1), b = field<N>(mesh, 1, cfg.seed, 2);
    const auto d = [&](const FormField<N>& dir, const FormField<N>& arg) {
      return fd_derivative([&](double t) { return theta_cs(A.shifted(t, dir), arg); }, cfg.fd_step).extrapolated;
    };
    m.residuals.push_back(std::abs(d(a, b) - d(b, a) - sigma_cs(A, a, b)));
    m.scales.push_back(spacing(c));
  }
  return m;
}

// -- functionals ------------------------------------------------------------

template <int N>
Measurement stokes_chern_weil(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> bulk;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(4, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const cplx b = second_chern(A);
    bulk.push_back(b.real());
    m.residuals.push_back(std::abs(b - 8 * pi * pi * boundary_chern_simons(A)));
    m.scales.push_back(spacing(c));
  }
  m.details["second_chern"] = bulk;
  return m;
}

Conventions conventions();

template <int N>
Measurement cs_quantization(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  const int s_cs = conventions().s_cs;
  std::vector<double> degrees;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c, 4);
    const GaugeMap<N> g = bump_gauge<N>(mesh);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const cplx jump = chern_simons3(gauge_transform(A, g)) - chern_simons3(A);
    const cplx deg = map_degree(g);
    degrees.push_back(deg.real());
    m.residuals.push_back(std::abs(jump - double(s_cs) * deg));
    m.scales.push_back(spacing(c));
  }
  const int oracle = preimage_degree(BumpMap{}, {1.0, 1.0, 1.0}, regular_value()).degree;
  m.details["degree"] = degrees;
  m.details["oracle_degree"] = oracle;
  m.details["degree_error_finest"] = std::abs(degrees.back() - oracle);
  return m;
}

template <int N>
Measurement degree_additivity(const CheckConfig&, const std::vector<int>& grids) {
  BumpMap g, f;
  g.center = {0.4, 0.5, 0.5};
  f.center = {0.6, 0.4, 0.5};
  f.radius = 0.4;
  f.reflect = true;
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c, 4);
    const GaugeMap<N> gm = bump_gauge<N>(mesh, g), fm = bump_gauge<N>(mesh, f);
    m.residuals.push_back(std::abs(map_degree(compose(gm, fm)) - map_degree(gm) - map_degree(fm)));
    m.scales.push_back(spacing(c));
  }
  return m;
}

template <int N>
Measurement reality_structure(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh m3 = Mesh::torus(3, c), m4 = Mesh::torus(4, c);
    const Connection<N> A(field<N>(m3, 1, cfg.seed, 0));
    const FormField<N> a = field<N>(m3, 1, cfg.seed, 1), b = field<N>(m3, 1, cfg.seed, 2),
                       cc = field<N>(m3, 1, cfg.seed, 3);
    const Connection<N> B(field<N>(m4, 1, cfg.seed, 4));
    const FormField<N> a4 = field<N>(m4, 1, cfg.seed, 5), b4 = field<N>(m4, 1, cfg.seed, 6);
    const double r = std::max({std::abs(chern_simons3(A).imag()), std::abs(map_degree(bump_gauge<N>(m3)).imag()),
                               std::abs(second_chern(B).imag()), std::abs(omega(A, a, b).real()),
                               std::abs(kappa(a, b, cc).real()), std::abs(sigma_cs(B, a4, b4).real())});
    m.residuals.push_back(r);
    m.scales.push_back(spacing(c));
  }
  return m;
}

// -- cotangent --------------------------------------------------------------

template <int N>
CotangentPoint<N> random_point(const Mesh& mesh, std::uint64_t seed, std::uint64_t stream) {
  return {Connection<N>(field<N>(mesh, 1, seed, stream)), field<N>(mesh, mesh.dim() - 1, seed, stream + 1)};
}

template <int N>
CotangentTangent<N> random_tangent(const Mesh& mesh, std::uint64_t seed, std::uint64_t stream) {
  return {field<N>(mesh, 1, seed, stream), field<N>(mesh, mesh.dim() - 1, seed, stream + 1)};
}

template <int N>
Measurement moment_j(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  double mixed_gap = INFINITY;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(3, c);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
      const CotangentPoint<N> p = random_point<N>(mesh, cfg.seed, 8 * k);
      const FormField<N> xi = field<N>(mesh, 0, cfg.seed, 8 * k + 2);
      const CotangentTangent<N> v = random_tangent<N>(mesh, cfg.seed, 8 * k + 3);
      const cplx analytic = moment_J_derivative(p, xi, v);
      const double t = cfg.fd_step;
      const cplx fd = (moment_J(CotangentPoint<N>(p.A.shifted(t, v.a), p.lambda + t * v.alpha), xi) -
                       moment_J(CotangentPoint<N>(p.A.shifted(-t, v.a), p.lambda + (-t) * v.alpha), xi)) /
                      (2 * t);
      worst = std::max({worst, std::abs(analytic - sigma_eval(p, moment_J_hamiltonian_field(p, xi), v)),
                        std::abs(fd - analytic)});
      const cplx mixed = sigma_eval(p, fundamental_field_mixed_sign(p, xi), v);
      mixed_gap = std::min(mixed_gap, std::min(std::abs(analytic - mixed), std::abs(analytic + mixed)) /
                                              std::max(std::abs(analytic), 1e-300));
    }
    m.residuals.push_back(worst);
    m.scales.push_back(spacing(c));
  }
  m.details["mixed_sign_field_min_relative_gap"] = mixed_gap;
  return m;
}

template <int N>
Measurement moment_j0(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(3, c);
    const CotangentPoint<N> p = random_point<N>(mesh, cfg.seed, 0);
    const FormField<N> xi = interior_function<N>(mesh, cfg.seed, 2);
    m.residuals.push_back(std::abs(moment_J(p, xi) + moment_J0_pairing(p, xi)));
    m.scales.push_back(spacing(c));
  }
  return m;
}

template <int N>
Measurement canonical_nondegeneracy(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  const int s = conventions().s_sigma;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c);
    const CotangentPoint<N> p = random_point<N>(mesh, cfg.seed, 0);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const CotangentTangent<N> v = random_tangent<N>(mesh, cfg.seed, 2 * k + 2);
      const double na = l2_inner(v.a, v.a).real(), nal = l2_inner(v.alpha, v.alpha).real();
      worst = std::max(worst, std::abs(canonical_pairing(p, v) - double(s) * (nal - na)) / (na + nal));
    }
    m.residuals.push_back(worst);
    m.scales.push_back(spacing(c));
  }
  m.details["samples"] = 100;
  return m;
}

template <int N>
Measurement ym_hamiltonian_field(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> fd_gap;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c);
    const CotangentPoint<N> p = random_point<N>(mesh, cfg.seed, 0);
    const CotangentTangent<N> v = random_tangent<N>(mesh, cfg.seed, 2);
    const cplx analytic = ym_hamiltonian_derivative(p, v);
    m.residuals.push_back(std::abs(analytic - sigma_eval(p, ym_ham_vector_field(p), v)));
    const FdValue fd = fd_derivative(
        [&](double t) { return ym_hamiltonian(CotangentPoint<N>(p.A.shifted(t, v.a), p.lambda + t * v.alpha)); },
        cfg.fd_step);
    fd_gap.push_back(std::abs(fd.extrapolated - analytic));
    m.scales.push_back(spacing(c));
  }
  m.details["fd_gap"] = fd_gap;
  return m;
}

template <int N>
Measurement atiyah_bott(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  const Mat<N> x = su_basis<N>()[0], y = su_basis<N>()[1], z = Mat<N>::Zero();
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(2, c);
    const FormField<N> a = field<N>(mesh, 1, cfg.seed, 0), b = field<N>(mesh, 1, cfg.seed, 1);
    const cplx constant = atiyah_bott_omega(constant_form<N>(mesh, 1, {x, z}), constant_form<N>(mesh, 1, {z, y}));
    m.residuals.push_back(std::max({std::abs(atiyah_bott_omega(a, a)),
                                    std::abs(atiyah_bott_omega(a, b) + atiyah_bott_omega(b, a)),
                                    std::abs(constant + 2.0 * (x * y).trace())}));
    m.scales.push_back(spacing(c));
  }
  return m;
}

// -- gauge ------------------------------------------------------------------

template <int N>
Measurement plaquette_holonomy_check(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const FormField<N> f = curvature(A);
    const double h = mesh.spacing(0);
    double worst = 0.0;
    for (std::size_t n = 0; n < mesh.node_count(); n += 37) {
      const std::size_t nx = mesh.shifted(n, 0, 1), ny = mesh.shifted(n, 1, 1), nxy = mesh.shifted(nx, 1, 1);
      const Mat<N> fc = 0.25 * (f.at(n, 0) + f.at(nx, 0) + f.at(ny, 0) + f.at(nxy, 0));
      worst = std::max(worst, (plaquette_holonomy(A, n, 0, 1) - su_exponential<N>(Mat<N>(-h * h * fc))).norm());
    }
    m.residuals.push_back(worst);
    m.scales.push_back(h);
  }
  return m;
}

template <int N>
Measurement bianchi(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    m.residuals.push_back(max_abs(covariant_d(A, curvature(A))));
    m.scales.push_back(spacing(c));
  }
  return m;
}

template <int N>
Measurement gauge_covariance(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  for (int c : grids) {
    const Mesh mesh = Mesh::torus(3, c, 4);
    const Connection<N> A(field<N>(mesh, 1, cfg.seed, 0));
    const GaugeMap<N> g = exp_map(field<N>(mesh, 0, cfg.seed, 1, 1.0));
    FormField<N> rhs = curvature(A);
    for (std::size_t n = 0; n < mesh.node_count(); ++n)
      for (int k = 0; k < rhs.components(); ++k) rhs.at(n, k) = g.at(n).adjoint() * rhs.at(n, k) * g.at(n);
    m.residuals.push_back(max_abs(curvature(gauge_transform(A, g)) - rhs));
    m.scales.push_back(spacing(c));
  }
  return m;
}

// -- elliptic ---------------------------------------------------------------

template <int N>
Measurement dirichlet_mms(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<int> iterations;
  const Mat<N> x = su_basis<N>()[0];
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(3, c);
    const auto exact = sample<N>(mesh, 0, [&](const auto& p, int) { return Mat<N>(std::sin(pi * p[0]) * x); });
    SolveStats st;
    const auto u = dirichlet_green(Connection<N>::zero(mesh), (pi * pi) * exact, cfg.solver, &st);
    iterations.push_back(st.iterations);
    m.residuals.push_back(max_abs(u - exact));
    m.scales.push_back(spacing(c));
  }
  m.details["iterations"] = iterations;
  return m;
}

template <int N>
Measurement neumann_mms(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> flux;
  const Mat<N> x = su_basis<N>()[0];
  for (int c : grids) {
    const Mesh mesh = box({c, 4, 4}, true, 4);
    const Connection<N> A = Connection<N>::zero(mesh);
    FormField<N> exact = sample<N>(mesh, 0, [&](const auto& p, int) { return Mat<N>(std::cos(pi * p[0]) * x); });
    const auto v = sample<N>(mesh, 1, [&](const auto& p, int k) {
      return Mat<N>((k == 0 ? -pi * std::sin(pi * p[0]) : 0.0) * x);
    });
    const auto g = neumann_green<N>(A, v, std::nullopt, cfg.solver);
    project_out(exact, flat_kernel<N>(mesh));
    m.residuals.push_back(max_abs(g - exact));
    flux.push_back(neumann_flux_residual(A, g, v));
    m.scales.push_back(spacing(c));
  }
  m.details["flux_residual"] = flux;
  if (grids.size() >= 2) {
    const OrderEstimate e = estimate_order(flux, m.scales);
    m.details["flux_order"] = e.saturated ? nlohmann::json("saturated") : nlohmann::json(*e.order);
  }
  return m;
}

template <int N>
Measurement coulomb_orthogonality(const CheckConfig& cfg, const std::vector<int>& grids) {
  Measurement m;
  std::vector<double> completeness, codiff;
  for (int c : grids) {
    const Mesh mesh = Mesh::cylinder(3, c, 4);
    const Connection<N> A = flat_pure_gauge<N>(mesh, cfg.seed, 0);
    const FormField<N> a = field<N>(mesh, 1, cfg.seed, 1);
    const auto r = coulomb_project(A, a, cfg.solver);
    const double na2 = frobenius_inner(a, a);
    m.residuals.push_back(std::abs(frobenius_inner(covariant_d(A, r.xi), r.b)) / na2);
    completeness.push_back(l2_norm(a - covariant_d(A, r.xi) - r.b) / l2_norm(a));
    codiff.push_back(r.codifferential_residual / l2_norm(a));
    m.scales.push_back(spacing(c));
  }
  m.details["completeness"] = completeness;
  m.details["interior_codifferential"] = codiff;
  return m;
}

template <int N>
Measurement kuranishi_identity(const CheckConfig& cfg, const std::vector<int>& grids) {
  const Mesh mesh = Mesh::cylinder(3, grids.front(), 4);
  const Connection<N> A = flat_pure_gauge<N>(mesh, cfg.seed, 0);
  const FormField<N> alpha = field<N>(mesh, 1, cfg.seed, 1);
  const FormField<N> quad = kuranishi(A, alpha, cfg.solver) - alpha;
  Measurement m;
  double exact_gap = 0.0;
  for (double t : {1e-1, 1e-2, 1e-3}) {
    const FormField<N> dev = kuranishi(A, t * alpha, cfg.solver) - t * alpha;
    m.residuals.push_back(l2_norm(dev));
    m.scales.push_back(t);
    exact_gap = std::max(exact_gap, l2_norm(dev - (t * t) * quad) / (t * t * l2_norm(quad)));
  }
  m.details["mesh"] = mesh.describe();
  m.details["quadratic_term_gap"] = exact_gap;
  return m;
}

template <int N>
Measurement elliptic_dense_oracle(const CheckConfig& cfg, const std::vector<int>& grids) {
  SolverConfig tight = cfg.solver;
  tight.tol = std::min(tight.tol, 1e-12);
  const auto rel = [](const FormField<N>& x, const FormField<N>& y) {
    return max_abs(x - y) / std::max(max_abs(y), 1e-300);
  };
  Measurement m;
  nlohmann::json parts = nlohmann::json::array();
  for (int c : grids) {
    const Mesh mesh = box({4, c, c}, true, 4);
    const Connection<N> A = flat_pure_gauge<N>(mesh, cfg.seed, 0);
    const Connection<N> zero = Connection<N>::zero(mesh);
    const FormField<N> f = field<N>(mesh, 0, cfg.seed, 1), v = field<N>(mesh, 1, cfg.seed, 2);
    const double dir = rel(dirichlet_green(A, f, tight), dense_dirichlet(A, f));
    const double neu = rel(neumann_green<N>(A, v, std::nullopt, tight), dense_neumann<N>(A, v, std::nullopt));
    const double neu0 =
        rel(neumann_green<N>(zero, v, std::nullopt, tight), dense_neumann<N>(zero, v, std::nullopt));

    // Scalar Hodge decomposition along one Cartan direction on [0,1]×T³.
    const Mesh m4 = box({4, c, c, c}, true, 4);
    const Mat<N> x = diagonal_direction<N>(1.0, 0.5);
    const Mat<N> xn = x / x.norm();
    const auto a = sample<N>(m4, 1, [&](const auto& p, int k) {
      return Mat<N>(std::sin(2 * pi * (p[1] + k * p[2]) + k * p[0]) * xn);
    });
    const Connection<N> z4 = Connection<N>::zero(m4);
    const auto cp = coulomb_project(z4, a, tight);
    const auto gf = neumann_gauge_fix(z4, cp.b, tight);
    const auto xi = dense_dirichlet<N>(z4, codifferential(a), {xn});
    const auto eta = dense_neumann<N>(z4, a - exterior_d(xi), std::nullopt, {xn});
    const double hodge = std::max(rel(cp.xi, xi), rel(gf.eta, eta));

    parts.push_back({{"dirichlet", dir}, {"neumann", neu}, {"neumann_flat", neu0}, {"scalar_hodge", hodge},
                     {"meshes", {mesh.describe(), m4.describe()}}});
    m.residuals.push_back(std::max({dir, neu, neu0, hodge}));
    m.scales.push_back(spacing(c));
  }
  m.details["parts"] = parts;
  return m;
}

}  // namespace checks

/// Measures s_cs, s_q and s_σ once per process.
inline Conventions measure_conventions() {
  Conventions c;
  {
    const Mesh mesh = Mesh::torus(3, 16, 4);
    const GaugeMap<2> g = checks::bump_gauge<2>(mesh);
    const Connection<2> A(checks::field<2>(mesh, 1, 1, 0));
    const double deg = map_degree(g).real();
    const double jump = (chern_simons3(gauge_transform(A, g)) - chern_simons3(A)).real();
    c.s_cs = jump * deg > 0 ? 1 : -1;
  }
  {
    const Mesh mesh = Mesh::torus(3, 32, 4);
    const GaugeMap<2> g = checks::bump_gauge<2>(mesh);
    const double deg = map_degree(g).real();
    c.s_q = sector_charge(pure_gauge(g)).real() * deg > 0 ? 1 : -1;
  }
  {
    const Mesh mesh = Mesh::torus(3, 4);
    const CotangentPoint<2> p = checks::random_point<2>(mesh, 1, 0);
    const FormField<2> alpha = checks::field<2>(mesh, 2, 1, 2);
    c.s_sigma = canonical_pairing(p, CotangentTangent<2>(FormField<2>(mesh, 1), alpha)).real() > 0 ? 1 : -1;
  }
  return c;
}

inline Conventions checks::conventions() {
  static const Conventions c = measure_conventions();
  return c;
}

inline nlohmann::json normalization() {
  return {{"q", constants::q},
          {"chern_simons", constants::cs3_norm},
          {"degree", constants::deg_norm},
          {"sector", constants::sector_norm}};
}

namespace detail {

template <template <int> class>
struct Tag {};

#define GAUGEFORMS_RANKED(fn) \
  [](const CheckConfig& cfg, const std::vector<int>& g) { \
    return checks::with_rank(cfg.n, [&]<int N>() { return checks::fn<N>(cfg, g); }); \
  }

inline std::vector<CheckInfo> build_registry() {
  using RC = ResidualClass;
  std::vector<CheckInfo> r;
  const auto add = [&](std::string name, std::string desc, std::string anchor, RC cls, double threshold,
                       std::vector<int> grids, Runner run, std::optional<double> max_order = std::nullopt) {
    r.push_back({std::move(name), std::move(desc), std::move(anchor), cls, threshold, max_order, std::move(grids),
                 std::move(run)});
  };
  const std::vector<int> std3{8, 16, 32}, small4{8, 12, 16}, one{8};

  add("su2-vanishing", "omega and kappa vanish for su(2) data: 100 random triples on T^3 (n fixed to 2)",
      "su(2): omega = kappa = 0", RC::exact, 1e-12, one,
      [](const CheckConfig& cfg, const std::vector<int>& g) { return checks::su2_vanishing(cfg, g); });
  add("omega-kappa-exact", "analytic variation of omega equals kappa for 50 random inputs on T^3, with a FD cross-check",
      "d~omega = kappa", RC::exact, 1e-10, one, GAUGEFORMS_RANKED(omega_kappa_exact));
  add("stokes-chern-weil", "int tr F^2 minus 8 pi^2 times the signed boundary Chern-Simons sum on [0,1]xT^3",
      "int_X tr F^2 = 8 pi^2 (CS(A|t=1) - CS(A|t=0))", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(stokes_chern_weil));
  add("cs-quantization", "Chern-Simons jump under the degree -1 bump gauge on T^3 against s_cs deg g",
      "CS(g.A) = CS(A) + s_cs deg g", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(cs_quantization));
  add("degree-additivity", "deg(g f) - deg g - deg f for two overlapping bump maps on T^3", "deg(g f) = deg f + deg g",
      RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(degree_additivity));
  add("sigma-cs-closed", "variational exterior derivative of sigma^cs on T^4 by extrapolated central differences",
      "d~sigma^cs = 0 on a closed 4-manifold", RC::convergent, 1.9, small4, GAUGEFORMS_RANKED(sigma_cs_closed));
  add("sigma-cs-generating", "antisymmetrized variation of theta^cs against sigma^cs on [0,1]xT^3",
      "sigma^cs = d~theta^cs", RC::convergent, 1.9, small4, GAUGEFORMS_RANKED(sigma_cs_generating));
  add("lie-derivative-lemma", "max of |i_v kappa| and |L_v omega| for v = d_A xi at pure-gauge A with flat a, b on T^3",
      "i_{d_A xi} kappa = 0 and L_{d_A xi} omega = 0 on flat data", RC::convergent, 1.9, std3,
      GAUGEFORMS_RANKED(lie_derivative_lemma));
  add("flat-sector-kappa", "|kappa(a, b, c)| for d_A-exact directions at pure-gauge A on T^3",
      "kappa = 0 on flat triples", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(flat_sector_kappa));
  add("moment-J", "d~J^xi against sigma(X, .) with X = (-d_A xi, [xi, lambda]), plus a FD cross-check",
      "J^xi(A, lambda) = int tr(d_A xi ^ lambda) is a moment map", RC::exact, 1e-10, one,
      GAUGEFORMS_RANKED(moment_j));
  add("moment-J0", "J^xi plus the pairing of xi with d_A lambda, xi vanishing on the boundary",
      "J_0(A, lambda) = d_A lambda", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(moment_j0));
  add("moment-phi-hamiltonian", "d~Phi^xi(a) + sigma^cs(d_A xi, a) on [0,1]xT^3, xi vanishing on the boundary",
      "Phi(A) = F_A^2 is a moment map for sigma^cs", RC::convergent, 1.9, small4,
      GAUGEFORMS_RANKED(moment_phi_hamiltonian));
  add("canonical-nondegeneracy", "sigma((a,alpha),(*alpha,*a)) against s_sigma(|alpha|^2 - |a|^2), 100 random inputs",
      "sigma((a,alpha),(*alpha,*a)) = s_sigma(|alpha|^2 - |a|^2)", RC::exact, 1e-10, one,
      GAUGEFORMS_RANKED(canonical_nondegeneracy));
  add("ym-hamiltonian-field", "dH(v) against sigma(X_H, v) with X_H = (-*lambda, d_A *F) on T^3",
      "Yang-Mills Hamiltonian vector field", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(ym_hamiltonian_field));
  add("atiyah-bott", "antisymmetry of 2 int tr(b^a) on T^2 and the constant example -2 tr(XY)",
      "Atiyah-Bott form 2 int_Sigma tr(b a)", RC::exact, 1e-12, one, GAUGEFORMS_RANKED(atiyah_bott));
  add("boundary-match", "sigma^cs minus the signed boundary omega for flat extensions on [0,1]xT^3",
      "r_X identifies sigma^cs with the boundary omega", RC::convergent, 1.9, small4, GAUGEFORMS_RANKED(boundary_match));
  add("reality-structure", "Im CS, Im deg, Im int tr F^2, Re omega, Re kappa, Re sigma^cs on su(n) data",
      "real functionals, imaginary forms", RC::exact, 1e-10, one, GAUGEFORMS_RANKED(reality_structure));
  add("plaquette-holonomy", "plaquette holonomy against exp(-h^2 F) at the plaquette center on T^3",
      "holonomy of a small loop = exp(-area F)", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(plaquette_holonomy_check));
  add("bianchi", "max |d_A F_A| on T^3", "d_A F_A = 0", RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(bianchi));
  add("gauge-covariance", "F(g.A) against g^-1 F g on T^3", "F_{g.A} = g^-1 F_A g", RC::convergent, 1.9, std3,
      GAUGEFORMS_RANKED(gauge_covariance));
  add("dirichlet-mms", "Dirichlet solve for u = sin(pi t) X on [0,1]xT^2 at A = 0", "G_A: Delta_A u = f, u|bdry = 0",
      RC::convergent, 1.9, std3, GAUGEFORMS_RANKED(dirichlet_mms));
  add("neumann-mms", "Neumann solve for g = cos(pi t) X with flux data from g at A = 0",
      "Delta_A g = 0, *d_A g|bdry = *v|bdry", RC::convergent, 1.9, {16, 32, 64}, GAUGEFORMS_RANKED(neumann_mms));
  add("coulomb-orthogonality", "|<d_A xi, b>| / |a|^2 after Coulomb projection at pure-gauge A on [0,1]xT^2",
      "T_A = {d_A xi} + ker d_A^*", RC::exact, 1e-10, std3, GAUGEFORMS_RANKED(coulomb_orthogonality));
  add("kuranishi-identity", "|K_A(t alpha) - t alpha| over t = 1e-1, 1e-2, 1e-3 on the first grid; slope 2",
      "K_A(alpha) = alpha + d_A^* G_A(alpha ^ alpha)", RC::convergent, 1.9, one, GAUGEFORMS_RANKED(kuranishi_identity),
      2.1);
  add("elliptic-dense-oracle", "iterative Dirichlet, Neumann and scalar Hodge solves against dense direct solves",
      "G_A and N_A by direct factorization", RC::exact, 1e-8, one, GAUGEFORMS_RANKED(elliptic_dense_oracle));
  return r;
}

#undef GAUGEFORMS_RANKED

}  // namespace detail

inline const std::vector<CheckInfo>& registry() {
  static const std::vector<CheckInfo> r = detail::build_registry();
  return r;
}

inline const CheckInfo& find_check(const std::string& name) {
  for (const auto& c : registry())
    if (c.name == name) return c;
  throw Error("unknown check '" + name + "'");
}

inline CheckReport run_check(const CheckConfig& config) {
  const CheckInfo& info = find_check(config.name);
  config.validate();
  CheckConfig cfg = config;
  if (cfg.grids.empty()) cfg.grids = info.default_grids;
  if (info.name == "su2-vanishing") cfg.n = 2;

  CheckReport r;
  r.check = info.name;
  r.params = {{"n", cfg.n},         {"seed", cfg.seed},           {"fd_step", cfg.fd_step},
              {"tol", cfg.solver.tol}, {"max_iter", cfg.solver.max_iter}};
  r.grids = cfg.grids;
  r.residual_class = info.residual_class;
  r.threshold = info.threshold;
  r.max_order = info.max_order;
  r.normalization = normalization();
  const auto start = std::chrono::steady_clock::now();
  try {
    r.conventions = checks::conventions();
    Measurement m = info.run(cfg, cfg.grids);
    r.residuals = std::move(m.residuals);
    r.scales = std::move(m.scales);
    r.details = std::move(m.details);
    if (r.residuals.size() >= 2) r.order = estimate_order(r.residuals, r.scales);
  } catch (const std::exception& e) {
    r.reason = e.what();
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  decide(r);
  return r;
}

}  // namespace gaugeforms::harness
