#pragma once

// Canonical structure on the cotangent bundle of the space of connections:
// θ, σ, the Yang–Mills Hamiltonian and its vector field, the moment maps J^ξ
// and J₀, and the Atiyah–Bott form on surfaces.

#include <cmath>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/gauge.hpp"

namespace gaugeforms {

/// (A, λ) with λ an (m−1)-form.
template <int N>
struct CotangentPoint {
  Connection<N> A;
  FormField<N> lambda;

  CotangentPoint(Connection<N> a, FormField<N> l) : A(std::move(a)), lambda(std::move(l)) {
    if (A.mesh() != lambda.mesh()) throw MismatchError("cotangent point fields live on different meshes");
    if (lambda.degree() != A.mesh().dim() - 1) throw DegreeError("λ must have degree dim − 1");
  }
  const Mesh& mesh() const { return A.mesh(); }
};

/// (a, α) with a a 1-form and α an (m−1)-form.
template <int N>
struct CotangentTangent {
  FormField<N> a;
  FormField<N> alpha;

  CotangentTangent(FormField<N> x, FormField<N> y) : a(std::move(x)), alpha(std::move(y)) {
    if (a.mesh() != alpha.mesh()) throw MismatchError("tangent components live on different meshes");
    if (a.degree() != 1 || alpha.degree() != a.mesh().dim() - 1)
      throw DegreeError("tangent components must have degrees 1 and dim − 1");
  }
  const Mesh& mesh() const { return a.mesh(); }
};

namespace detail {
template <int N>
void require_same(const CotangentPoint<N>& p, const CotangentTangent<N>& v) {
  if (p.mesh() != v.mesh()) throw MismatchError("point and tangent live on different meshes");
}
}  // namespace detail

/// θ_(A,λ)(a, α) = ∫ tr(a∧λ).
template <int N>
cplx theta_eval(const CotangentPoint<N>& p, const CotangentTangent<N>& v) {
  detail::require_same(p, v);
  return integrate_wedge_trace(v.a, p.lambda);
}

/// σ((a,α),(b,β)) = ∫ tr(b∧α − a∧β). The point only fixes the mesh.
template <int N>
cplx sigma_eval(const CotangentPoint<N>& p, const CotangentTangent<N>& v1, const CotangentTangent<N>& v2) {
  detail::require_same(p, v1);
  detail::require_same(p, v2);
  return integrate_wedge_trace(v2.a, v1.alpha) - integrate_wedge_trace(v1.a, v2.alpha);
}

/// |d̃θ(v1, v2) − σ(v1, v2)| with d̃θ from central differences of step t
/// along constant directions.
template <int N>
double sigma_is_dtheta_check(const CotangentPoint<N>& p, const CotangentTangent<N>& v1,
                             const CotangentTangent<N>& v2, double t) {
  if (!(t > 0.0)) throw Error("finite-difference step must be positive");
  const auto moved = [&](const CotangentTangent<N>& v, double s) {
    return CotangentPoint<N>(p.A.shifted(s, v.a), p.lambda + s * v.alpha);
  };
  const cplx d12 = (theta_eval(moved(v1, t), v2) - theta_eval(moved(v1, -t), v2)) / (2 * t);
  const cplx d21 = (theta_eval(moved(v2, t), v1) - theta_eval(moved(v2, -t), v1)) / (2 * t);
  return std::abs(d12 - d21 - sigma_eval(p, v1, v2));
}

/// σ((a,α), (∗α, ∗a)); equals s_σ(‖α‖² − ‖a‖²) with s_σ = −1.
template <int N>
cplx canonical_pairing(const CotangentPoint<N>& p, const CotangentTangent<N>& v) {
  return sigma_eval(p, v, CotangentTangent<N>(hodge_star(v.alpha), hodge_star(v.a)));
}

/// H = ½∫tr(F∧∗F) + ½∫tr(λ∧∗λ), with the literal trace (so H ≤ 0 on
/// su(n) data; ym_energy returns −H).
template <int N>
cplx ym_hamiltonian(const CotangentPoint<N>& p) {
  const FormField<N> f = curvature(p.A);
  return 0.5 * integrate_wedge_trace(f, hodge_star(f)) + 0.5 * integrate_wedge_trace(p.lambda, hodge_star(p.lambda));
}

template <int N>
double ym_energy(const CotangentPoint<N>& p) {
  return -ym_hamiltonian(p).real();
}

/// Exact directional derivative of the discrete H along (a, α):
/// ∫tr(d_A a∧∗F) + ∫tr(α∧∗λ).
template <int N>
cplx ym_hamiltonian_derivative(const CotangentPoint<N>& p, const CotangentTangent<N>& v) {
  detail::require_same(p, v);
  const FormField<N> f = curvature(p.A);
  return integrate_wedge_trace(covariant_d(p.A, v.a), hodge_star(f)) +
         integrate_wedge_trace(v.alpha, hodge_star(p.lambda));
}

/// X_H = (−∗λ, d_A(∗F)).
template <int N>
CotangentTangent<N> ym_ham_vector_field(const CotangentPoint<N>& p) {
  return CotangentTangent<N>(-hodge_star(p.lambda), covariant_d(p.A, hodge_star(curvature(p.A))));
}

/// J^ξ(A, λ) = ∫ tr(d_Aξ∧λ).
template <int N>
cplx moment_J(const CotangentPoint<N>& p, const FormField<N>& xi) {
  if (xi.mesh() != p.mesh()) throw MismatchError("ξ lives on a different mesh");
  return integrate_wedge_trace(covariant_d(p.A, xi), p.lambda);
}

/// Exact directional derivative of J^ξ along (a, α):
/// ∫tr([a,ξ]∧λ) + ∫tr(d_Aξ∧α).
template <int N>
cplx moment_J_derivative(const CotangentPoint<N>& p, const FormField<N>& xi, const CotangentTangent<N>& v) {
  detail::require_same(p, v);
  return integrate_wedge_trace(graded_commutator(v.a, xi), p.lambda) +
         integrate_wedge_trace(covariant_d(p.A, xi), v.alpha);
}

/// Vector field X with d̃J^ξ = σ(X, ·) under sigma_eval: (−d_Aξ, [ξ, λ]).
template <int N>
CotangentTangent<N> moment_J_hamiltonian_field(const CotangentPoint<N>& p, const FormField<N>& xi) {
  return CotangentTangent<N>(-covariant_d(p.A, xi), graded_commutator(xi, p.lambda));
}

/// Fundamental field of the gauge action lifted to the cotangent bundle,
/// (d_Aξ, [λ, ξ]); equal to −moment_J_hamiltonian_field.
template <int N>
CotangentTangent<N> cotangent_lift(const CotangentPoint<N>& p, const FormField<N>& xi) {
  return CotangentTangent<N>(covariant_d(p.A, xi), graded_commutator(p.lambda, xi));
}

/// (d_Aξ, [ξ, λ]): the orbit direction paired with the fibre term of the
/// opposite sign. Not Hamiltonian for J^ξ; kept for reporting its residual.
template <int N>
CotangentTangent<N> fundamental_field_mixed_sign(const CotangentPoint<N>& p, const FormField<N>& xi) {
  return CotangentTangent<N>(covariant_d(p.A, xi), graded_commutator(xi, p.lambda));
}

/// J₀(A, λ) = d_A λ.
template <int N>
FormField<N> moment_J0(const CotangentPoint<N>& p) {
  return covariant_d(p.A, p.lambda);
}

/// ∫ tr(ξ J₀). By Stokes, J^ξ = −∫tr(ξ J₀) when ξ vanishes on the boundary.
template <int N>
cplx moment_J0_pairing(const CotangentPoint<N>& p, const FormField<N>& xi) {
  return integrate_trace(multiply(xi, moment_J0(p)));
}

/// Atiyah–Bott form 2∫_Σ tr(b∧a) on a surface.
template <int N>
cplx atiyah_bott_omega(const FormField<N>& a, const FormField<N>& b) {
  if (a.mesh().dim() != 2) throw MismatchError("atiyah_bott_omega needs a 2-dimensional mesh");
  if (a.degree() != 1 || b.degree() != 1) throw DegreeError("atiyah_bott_omega expects 1-forms");
  return 2.0 * integrate_wedge_trace(b, a);
}

}  // namespace gaugeforms
