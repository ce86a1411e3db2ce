#pragma once

// Scalar functionals: Chern–Simons, mapping degree, second Chern integral,
// sector charge, and the Chern–Simons 3-form on 4-manifolds.

#include <cmath>
#include <numbers>
#include <optional>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/gauge.hpp"

namespace gaugeforms {

/// Normalization constants, echoed in every report.
namespace constants {
inline constexpr double pi = std::numbers::pi;
/// Prefactor of the Chern–Simons 3-form on 4-manifolds, 1/(24π³).
inline constexpr double q = 1.0 / (24.0 * pi * pi * pi);
/// Prefactor of CS₍₃₎, 1/(8π²).
inline constexpr double cs3_norm = 1.0 / (8.0 * pi * pi);
/// Prefactor of the degree integral, 1/(24π²).
inline constexpr double deg_norm = 1.0 / (24.0 * pi * pi);
/// Prefactor of the sector charge ∫tr A³, 1/(24π²).
inline constexpr double sector_norm = 1.0 / (24.0 * pi * pi);
}  // namespace constants

namespace detail {
inline void require_dim(const Mesh& m, int d, const char* what) {
  if (m.dim() != d) throw MismatchError(std::string(what) + " needs a " + std::to_string(d) + "-dimensional mesh");
}
}  // namespace detail

/// cs3_norm · ∫ tr(A∧F − ⅓ A∧A∧A).
template <int N>
cplx chern_simons3(const Connection<N>& a) {
  detail::require_dim(a.mesh(), 3, "chern_simons3");
  const FormField<N>& A = a.form();
  const FormField<N> f = curvature(a);
  return constants::cs3_norm * (integrate_wedge_trace(A, f) - integrate_wedge3_trace(A, A, A) / 3.0);
}

/// Exact directional derivative of the discrete chern_simons3 at A along a.
template <int N>
cplx chern_simons3_derivative(const Connection<N>& a, const FormField<N>& dir) {
  detail::require_dim(a.mesh(), 3, "chern_simons3_derivative");
  const FormField<N>& A = a.form();
  const FormField<N> f = curvature(a);
  FormField<N> df = exterior_d(dir);
  df += wedge(dir, A);
  df += wedge(A, dir);
  const cplx cubic = integrate_wedge3_trace(dir, A, A) + integrate_wedge3_trace(A, dir, A) +
                     integrate_wedge3_trace(A, A, dir);
  return constants::cs3_norm * (integrate_wedge_trace(dir, f) + integrate_wedge_trace(A, df) - cubic / 3.0);
}

/// cs3_norm · ∫ tr(A∧A∧a): the first variation of CS₍₃₎ written for flat A.
template <int N>
cplx chern_simons3_flat_variation(const Connection<N>& a, const FormField<N>& dir) {
  detail::require_dim(a.mesh(), 3, "chern_simons3_flat_variation");
  return constants::cs3_norm * integrate_wedge3_trace(a.form(), a.form(), dir);
}

/// dg·g⁻¹ from the mesh stencil, projected to su(n).
template <int N>
FormField<N> right_maurer_cartan(const GaugeMap<N>& g) {
  const FormField<N> dg = exterior_d(g.as_form());
  FormField<N> r(g.mesh(), 1);
  for (std::size_t n = 0; n < g.mesh().node_count(); ++n) {
    const Mat<N> inv = g.at(n).adjoint();
    for (int i = 0; i < g.mesh().dim(); ++i) r.at(n, i).noalias() = dg.at(n, i) * inv;
  }
  detail::project_and_record(r);
  return r;
}

/// deg_norm · ∫ tr((dg g⁻¹)³).
template <int N>
cplx map_degree(const GaugeMap<N>& g) {
  detail::require_dim(g.mesh(), 3, "map_degree");
  const FormField<N> r = right_maurer_cartan(g);
  return constants::deg_norm * integrate_wedge3_trace(r, r, r);
}

/// ∫ tr(F∧F), unnormalized.
template <int N>
cplx second_chern(const Connection<N>& a) {
  detail::require_dim(a.mesh(), 4, "second_chern");
  const FormField<N> f = curvature(a);
  return integrate_wedge_trace(f, f);
}

/// Σ sign · CS₍₃₎(A restricted to each end slice) on a 4-dimensional
/// cylinder, with the induced boundary orientation.
template <int N>
cplx boundary_chern_simons(const Connection<N>& a) {
  detail::require_dim(a.mesh(), 4, "boundary_chern_simons");
  if (a.mesh().closed()) throw Error("boundary_chern_simons needs a cylinder");
  cplx s = 0.0;
  for (const auto& slice : boundary_restrict(a.form()).slices)
    s += slice.sign * chern_simons3(Connection<N>(slice.field));
  return s;
}

/// Default flatness threshold for sector_charge: 10·h² scaled by the square
/// of the largest connection entry (at least 1).
template <int N>
double default_flatness_threshold(const Connection<N>& a) {
  const double h = a.mesh().max_spacing();
  const double s = std::max(1.0, max_abs(a.form()));
  return 10.0 * h * h * s * s;
}

/// sector_norm · ∫ tr(A∧A∧A) for a flat connection. Throws
/// PreconditionError (carrying the residual) if flatness_residual exceeds
/// the threshold.
template <int N>
cplx sector_charge(const Connection<N>& a, std::optional<double> threshold = std::nullopt) {
  detail::require_dim(a.mesh(), 3, "sector_charge");
  const double limit = threshold ? *threshold : default_flatness_threshold(a);
  const double r = flatness_residual(a);
  if (r > limit) throw PreconditionError("sector_charge needs a flat connection", r, limit);
  const FormField<N>& A = a.form();
  return constants::sector_norm * integrate_wedge3_trace(A, A, A);
}

/// q · (A∧F + F∧A − ½ A∧A∧A).
template <int N>
FormField<N> cs_form(const Connection<N>& a) {
  detail::require_dim(a.mesh(), 4, "cs_form");
  const FormField<N>& A = a.form();
  const FormField<N> f = curvature(a);
  FormField<N> out = wedge(A, f);
  out += wedge(f, A);
  out.axpy(-0.5, wedge(A, wedge(A, A)));
  out *= cplx(constants::q);
  return out;
}

/// ∫ tr(cs_form(A)∧a).
template <int N>
cplx theta_cs(const Connection<N>& a, const FormField<N>& dir) {
  if (a.mesh() != dir.mesh()) throw MismatchError("theta_cs operands live on different meshes");
  if (dir.degree() != 1) throw DegreeError("theta_cs expects a 1-form direction");
  return integrate_wedge_trace(cs_form(a), dir);
}

}  // namespace gaugeforms
