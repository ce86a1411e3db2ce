#pragma once

// Pre-symplectic structures on spaces of connections: σ^cs on 4-manifolds,
// ω and its twisting 3-form κ on 3-manifolds, the variational exterior
// derivative, the contraction/Lie-derivative identities along gauge
// directions, the moment map Φ, and the boundary identification.

#include <cmath>
#include <optional>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/functionals.hpp"
#include "gaugeforms/gauge.hpp"

namespace gaugeforms {

namespace detail {
template <int N>
void require_directions(const Mesh& m, std::initializer_list<const FormField<N>*> dirs) {
  for (const auto* d : dirs) {
    if (d->mesh() != m) throw MismatchError("directions live on a different mesh");
    if (d->degree() != 1) throw DegreeError("tangent directions are 1-forms");
  }
}

/// ∫ tr((a∧b − b∧a)∧c).
template <int N>
cplx commutator_triple(const FormField<N>& a, const FormField<N>& b, const FormField<N>& c) {
  return integrate_wedge3_trace(a, b, c) - integrate_wedge3_trace(b, a, c);
}
}  // namespace detail

/// ω_A(a, b) = −q ∫ tr((a∧b − b∧a)∧A) on a 3-mesh.
template <int N>
cplx omega(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b) {
  detail::require_dim(A.mesh(), 3, "omega");
  detail::require_directions<N>(A.mesh(), {&a, &b});
  return -constants::q * detail::commutator_triple(a, b, A.form());
}

/// κ(a, b, c) = −3q ∫ tr((a∧b − b∧a)∧c); independent of the connection.
template <int N>
cplx kappa(const FormField<N>& a, const FormField<N>& b, const FormField<N>& c) {
  detail::require_dim(a.mesh(), 3, "kappa");
  detail::require_directions<N>(a.mesh(), {&b, &c});
  return -3.0 * constants::q * detail::commutator_triple(a, b, c);
}

/// d̃ω(a, b, c) from analytic directional derivatives. ω is linear in A, so
/// ∂_a ω_A(b, c) = ω evaluated with A replaced by a.
template <int N>
cplx omega_variation(const FormField<N>& a, const FormField<N>& b, const FormField<N>& c) {
  return omega(Connection<N>(a), b, c) + omega(Connection<N>(b), c, a) + omega(Connection<N>(c), a, b);
}

/// Bulk part 3q ∫_X tr((a∧b − b∧a)∧F_A) of σ^cs.
template <int N>
cplx sigma_cs_bulk(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b) {
  detail::require_dim(A.mesh(), 4, "sigma_cs");
  detail::require_directions<N>(A.mesh(), {&a, &b});
  const FormField<N> f = curvature(A);
  FormField<N> ab = wedge(a, b);
  ab -= wedge(b, a);
  return 3.0 * constants::q * integrate_wedge_trace(ab, f);
}

/// Σ sign · ω(restrictions of A, a, b) over the end slices (0 when closed).
template <int N>
cplx boundary_omega(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b) {
  detail::require_dim(A.mesh(), 4, "boundary_omega");
  detail::require_directions<N>(A.mesh(), {&a, &b});
  if (A.mesh().closed()) return 0.0;
  const auto ra = boundary_restrict(A.form()), rx = boundary_restrict(a), ry = boundary_restrict(b);
  cplx s = 0.0;
  for (std::size_t k = 0; k < ra.slices.size(); ++k)
    s += ra.slices[k].sign * omega(Connection<N>(ra.slices[k].field), rx.slices[k].field, ry.slices[k].field);
  return s;
}

/// σ^cs_A(a, b) = 3q∫_X tr((ab − ba)F_A) − q∫_∂X tr((ab − ba)A).
template <int N>
cplx sigma_cs(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b) {
  return sigma_cs_bulk(A, a, b) + boundary_omega(A, a, b);
}

/// Central difference with one Richardson level.
struct FdValue {
  cplx raw;           ///< step t
  cplx extrapolated;  ///< (4·D(t/2) − D(t))/3
};

/// Derivative of s ↦ f(s) at 0 by central differences.
template <class F>
FdValue fd_derivative(F&& f, double t) {
  const auto d = [&](double s) { return (f(s) - f(-s)) / (2 * s); };
  const cplx coarse = d(t), fine = d(0.5 * t);
  return {coarse, (4.0 * fine - coarse) / 3.0};
}

/// (d̃φ)_A(a, b, c) = ∂_a φ(b, c) + ∂_b φ(c, a) + ∂_c φ(a, b) for a
/// 2-form φ(A, x, y) on connections, by central differences along constant
/// directions.
template <int N, class Phi>
FdValue variational_d2(Phi&& phi, const Connection<N>& A, const FormField<N>& a, const FormField<N>& b,
                       const FormField<N>& c, double t = 1e-3) {
  const auto along = [&](const FormField<N>& dir, const FormField<N>& x, const FormField<N>& y) {
    return fd_derivative([&](double s) { return phi(A.shifted(s, dir), x, y); }, t);
  };
  const FdValue p = along(a, b, c), q = along(b, c, a), r = along(c, a, b);
  return {p.raw + q.raw + r.raw, p.extrapolated + q.extrapolated + r.extrapolated};
}

/// Thresholds deciding whether data count as flat.
struct FlatnessLimits {
  /// Limit on flatness_residual(A); default_flatness_threshold(A) if empty.
  std::optional<double> connection;
  /// A direction a is flat when ‖d_A a‖ ≤ direction_factor·h²·‖a‖.
  double direction_factor = 10.0;
};

/// ‖d_A a‖ in the weighted L² norm.
template <int N>
double direction_flatness(const Connection<N>& A, const FormField<N>& a) {
  return l2_norm(covariant_d(A, a));
}

template <int N>
void require_flat(const Connection<N>& A, std::initializer_list<const FormField<N>*> dirs,
                  const FlatnessLimits& limits) {
  const double lim = limits.connection ? *limits.connection : default_flatness_threshold(A);
  const double r = flatness_residual(A);
  if (r > lim) throw PreconditionError("connection is not flat", r, lim);
  const double h = A.mesh().max_spacing();
  for (const auto* d : dirs) {
    const double dl = limits.direction_factor * h * h * l2_norm(*d);
    const double dr = direction_flatness(A, *d);
    if (dr > dl) throw PreconditionError("direction is not flat", dr, dl);
  }
}

/// (i_{d_Aξ} κ)(a, b) = κ(d_Aξ, a, b) at flat A with flat a, b.
template <int N>
cplx inner_kappa(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a, const FormField<N>& b,
                 const FlatnessLimits& limits = {}) {
  require_flat(A, {&a, &b}, limits);
  return kappa(infinitesimal_action(A, xi), a, b);
}

/// (i_{d_Aξ} ω)_A(a) = ω_A(d_Aξ, a).
template <int N>
cplx contraction_omega(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a) {
  return omega(A, infinitesimal_action(A, xi), a);
}

/// −q ∫ tr((A²ξ + ξA²)∧a): the closed form of ω_A(d_Aξ, a) for flat A and
/// flat a, up to an exact term.
template <int N>
cplx contraction_omega_flat_form(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a) {
  detail::require_dim(A.mesh(), 3, "contraction_omega_flat_form");
  const FormField<N> a2 = wedge(A.form(), A.form());
  FormField<N> s = multiply(xi, a2, false);
  s += multiply(xi, a2, true);
  return -constants::q * integrate_wedge_trace(s, a);
}

/// Pieces of L_{d_Aξ} ω (a, b) = d̃(i_v ω)(a, b) + (i_v κ)(a, b), v = d_Aξ.
struct LieDerivativeParts {
  /// d̃(i_v ω)(a, b) with v held fixed: ω_a(v, b) − ω_b(v, a).
  cplx d_inner;
  /// κ(v, a, b).
  cplx inner_kappa;
  /// d_inner + inner_kappa.
  cplx cartan;
  /// ω_{A→v}(a, b), which equals cartan identically by d̃ω = κ.
  cplx direct;
  /// Extra term when v = d_Aξ moves with A: ω_A([a,ξ], b) − ω_A([b,ξ], a).
  cplx moving_frame;
};

template <int N>
LieDerivativeParts lie_derivative_parts(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a,
                                        const FormField<N>& b) {
  const FormField<N> v = infinitesimal_action(A, xi);
  LieDerivativeParts p;
  p.d_inner = omega(Connection<N>(a), v, b) - omega(Connection<N>(b), v, a);
  p.inner_kappa = kappa(v, a, b);
  p.cartan = p.d_inner + p.inner_kappa;
  p.direct = omega(Connection<N>(v), a, b);
  p.moving_frame = omega(A, graded_commutator(a, xi), b) - omega(A, graded_commutator(b, xi), a);
  return p;
}

/// L_{d_Aξ} ω (a, b) at flat A with flat a, b, assembled by the Cartan formula.
template <int N>
cplx lie_derivative_omega(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a,
                          const FormField<N>& b, const FlatnessLimits& limits = {}) {
  require_flat(A, {&a, &b}, limits);
  return lie_derivative_parts(A, xi, a, b).cartan;
}

/// |κ(a, b, c)| for flat directions at flat A.
template <int N>
double kappa_flat_sector_check(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b,
                               const FormField<N>& c, const FlatnessLimits& limits = {}) {
  require_flat(A, {&a, &b, &c}, limits);
  return std::abs(kappa(a, b, c));
}

namespace detail {
template <int N>
double max_boundary_value(const FormField<N>& xi) {
  double m = 0.0;
  const Mesh& mesh = xi.mesh();
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    if (mesh.on_boundary(n)) m = std::max(m, xi.at(n, 0).cwiseAbs().maxCoeff());
  return m;
}
}  // namespace detail

/// Φ^ξ(A) = (1/8π³) ∫_X tr(ξ F∧F), for ξ vanishing on the boundary.
template <int N>
cplx moment_phi(const Connection<N>& A, const FormField<N>& xi, double boundary_tolerance = 1e-12) {
  detail::require_dim(A.mesh(), 4, "moment_phi");
  if (xi.degree() != 0) throw DegreeError("moment_phi expects a 0-form");
  const double bv = detail::max_boundary_value(xi);
  if (bv > boundary_tolerance) throw PreconditionError("ξ must vanish on the boundary", bv, boundary_tolerance);
  const FormField<N> f = curvature(A);
  return 3.0 * constants::q * integrate_wedge_trace(multiply(xi, f), f);
}

/// Exact directional derivative of the discrete Φ^ξ along a:
/// 3q ∫ tr(ξ (d_A a∧F + F∧d_A a)).
template <int N>
cplx moment_phi_derivative(const Connection<N>& A, const FormField<N>& xi, const FormField<N>& a) {
  detail::require_dim(A.mesh(), 4, "moment_phi_derivative");
  const FormField<N> f = curvature(A);
  const FormField<N> da = covariant_d(A, a);
  return 3.0 * constants::q * (integrate_wedge_trace(multiply(xi, da), f) + integrate_wedge_trace(multiply(xi, f), da));
}

/// |σ^cs(A; a, b) − Σ sign·ω(restrictions)| for flat A on a cylinder, i.e.
/// the size of the bulk term.
template <int N>
double boundary_omega_match(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b,
                            std::optional<double> flatness_limit = std::nullopt) {
  if (A.mesh().closed()) throw Error("boundary_omega_match needs a cylinder");
  const double lim = flatness_limit ? *flatness_limit : default_flatness_threshold(A);
  const double r = flatness_residual(A);
  if (r > lim) throw PreconditionError("connection is not flat", r, lim);
  return std::abs(sigma_cs(A, a, b) - boundary_omega(A, a, b));
}

}  // namespace gaugeforms
