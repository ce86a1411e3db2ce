#pragma once

// Covariant Laplacian solves: Dirichlet Green operator (0-forms and p-forms),
// Coulomb projection, orbit curvature, Neumann solves and gauge fixing, the
// Kuranishi map, and a dense direct-solve oracle for small meshes.

#include <cmath>
#include <functional>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/gauge.hpp"

namespace gaugeforms {

struct SolverConfig {
  double tol = 1e-10;  ///< relative residual target in the weighted norm
  int max_iter = 20000;
  bool precondition = true;  ///< diagonal (Jacobi) preconditioner
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  ///< final relative residual
};

/// Δ_A u = δ_A d_A u + d_A δ_A u (the second term is absent for 0-forms).
template <int N>
FormField<N> hodge_laplacian_apply(const Connection<N>& A, const FormField<N>& u) {
  FormField<N> out(u.mesh(), u.degree());
  if (u.degree() < u.mesh().dim()) out += covariant_codifferential(A, covariant_d(A, u));
  if (u.degree() > 0) out += covariant_d(A, covariant_codifferential(A, u));
  return out;
}

/// δ_A d_A u on 0-forms.
template <int N>
FormField<N> laplacian0_apply(const Connection<N>& A, const FormField<N>& u) {
  if (u.degree() != 0) throw DegreeError("laplacian0_apply expects a 0-form");
  if (A.mesh() != u.mesh()) throw MismatchError("connection and field live on different meshes");
  return covariant_codifferential(A, covariant_d(A, u));
}

namespace detail {

/// Diagonal of the scalar operators D*D and DD* along one axis, indexed by
/// the node position on that axis.
template <int N>
std::pair<std::vector<double>, std::vector<double>> axis_diagonals(const Mesh& mesh, int axis) {
  const Mesh line({mesh.count(axis)}, {mesh.extent(axis)}, {mesh.topology(axis)}, mesh.stencil_order());
  const int len = mesh.nodes_along(axis);
  std::vector<double> dtd(len), ddt(len);
  for (int j = 0; j < len; ++j) {
    FormField<N> e0(line, 0), e1(line, 1);
    e0.at(j, 0)(0, 0) = 1.0;
    e1.at(j, 0)(0, 0) = 1.0;
    dtd[j] = codifferential(exterior_d(e0)).at(j, 0)(0, 0).real();
    ddt[j] = exterior_d(codifferential(e1)).at(j, 0)(0, 0).real();
  }
  return {dtd, ddt};
}

/// Per-node, per-component diagonal of the flat Hodge Laplacian on p-forms.
template <int N>
std::vector<double> laplacian_diagonal(const Mesh& mesh, int degree) {
  const int d = mesh.dim();
  std::vector<std::pair<std::vector<double>, std::vector<double>>> ax;
  for (int i = 0; i < d; ++i) ax.push_back(axis_diagonals<N>(mesh, i));
  const auto& comps = combinatorics::combos(d, degree);
  std::vector<double> diag(mesh.node_count() * comps.size());
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    for (std::size_t c = 0; c < comps.size(); ++c) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) {
        const int k = mesh.index_along(n, i);
        s += (comps[c] & (1u << i)) ? ax[i].second[k] : ax[i].first[k];
      }
      diag[n * comps.size() + c] = s;
    }
  return diag;
}

template <int N>
void zero_boundary(FormField<N>& f) {
  const Mesh& m = f.mesh();
  for (std::size_t n = 0; n < m.node_count(); ++n)
    if (m.on_boundary(n))
      for (int c = 0; c < f.components(); ++c) f.at(n, c).setZero();
}

}  // namespace detail

/// Preconditioned conjugate gradients in the weighted Frobenius inner
/// product. `apply` must be self-adjoint and nonnegative on the subspace
/// kept by `restrict`, which is applied to the right-hand side and to every
/// residual (projection onto unknowns, or removal of a kernel).
template <int N>
FormField<N> conjugate_gradient(const std::function<FormField<N>(const FormField<N>&)>& apply, const FormField<N>& rhs,
                                const std::vector<double>* diagonal,
                                const std::function<void(FormField<N>&)>& restrict, const SolverConfig& cfg,
                                SolveStats* stats = nullptr) {
  if (!(cfg.tol > 0.0) || cfg.max_iter < 1) throw Error("invalid solver configuration");
  FormField<N> b = rhs;
  restrict(b);
  FormField<N> x(b.mesh(), b.degree());
  const double bnorm = l2_norm(b);
  SolveStats st;
  if (bnorm == 0.0) {
    if (stats) *stats = st;
    return x;
  }
  const auto precondition = [&](const FormField<N>& r) {
    FormField<N> z = r;
    if (diagonal && cfg.precondition) {
      const int nc = z.components();
      for (std::size_t n = 0; n < z.nodes(); ++n)
        for (int c = 0; c < nc; ++c) {
          const double dv = (*diagonal)[n * nc + c];
          if (dv > 0.0) z.at(n, c) /= dv;
        }
    }
    restrict(z);
    return z;
  };
  FormField<N> r = b;
  FormField<N> z = precondition(r);
  FormField<N> p = z;
  double rz = frobenius_inner(r, z);
  for (st.iterations = 1; st.iterations <= cfg.max_iter; ++st.iterations) {
    FormField<N> ap = apply(p);
    restrict(ap);
    const double pap = frobenius_inner(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rz / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    st.residual = l2_norm(r) / bnorm;
    if (st.residual <= cfg.tol) break;
    z = precondition(r);
    const double rz_new = frobenius_inner(r, z);
    p *= cplx(rz_new / rz);
    p += z;
    rz = rz_new;
  }
  // Recompute the true residual.
  FormField<N> ax = apply(x);
  restrict(ax);
  st.residual = l2_norm(b - ax) / bnorm;
  st.iterations = std::min(st.iterations, cfg.max_iter);
  if (stats) *stats = st;
  if (st.residual > cfg.tol * 10.0)
    throw SolverError("conjugate gradients did not converge", st.iterations, st.residual);
  return x;
}

/// Solves Δ_A u = f for a p-form u vanishing (all components) on the
/// boundary slices of a cylinder.
template <int N>
FormField<N> dirichlet_solve(const Connection<N>& A, const FormField<N>& f, const SolverConfig& cfg = {},
                             SolveStats* stats = nullptr) {
  if (A.mesh() != f.mesh()) throw MismatchError("connection and source live on different meshes");
  if (A.mesh().closed()) throw Error("Dirichlet problems need a cylinder mesh");
  const auto diag = detail::laplacian_diagonal<N>(f.mesh(), f.degree());
  const auto restrict = [](FormField<N>& x) { detail::zero_boundary(x); };
  const auto apply = [&](const FormField<N>& x) { return hodge_laplacian_apply(A, x); };
  return conjugate_gradient<N>(apply, f, &diag, restrict, cfg, stats);
}

/// Green operator of the Dirichlet problem Δ_A u = f, u|∂ = 0, on 0-forms.
template <int N>
FormField<N> dirichlet_green(const Connection<N>& A, const FormField<N>& f, const SolverConfig& cfg = {},
                             SolveStats* stats = nullptr) {
  if (f.degree() != 0) throw DegreeError("dirichlet_green expects a 0-form");
  return dirichlet_solve(A, f, cfg, stats);
}

/// Weighted norm of a field over nodes off the boundary slices.
template <int N>
double interior_norm(FormField<N> f) {
  detail::zero_boundary(f);
  return l2_norm(f);
}

template <int N>
struct DecompositionResult {
  FormField<N> xi;  ///< G_A δ_A a
  FormField<N> b;   ///< a − d_Aξ
  double codifferential_residual = 0.0;  ///< interior ‖δ_A b‖
  SolveStats stats;
};

/// a = d_Aξ + b with ξ = G_A(δ_A a) and δ_A b = 0 at interior nodes.
template <int N>
DecompositionResult<N> coulomb_project(const Connection<N>& A, const FormField<N>& a, const SolverConfig& cfg = {}) {
  if (a.degree() != 1) throw DegreeError("coulomb_project expects a 1-form");
  DecompositionResult<N> out;
  out.xi = dirichlet_green(A, covariant_codifferential(A, a), cfg, &out.stats);
  out.b = a - covariant_d(A, out.xi);
  out.codifferential_residual = interior_norm(covariant_codifferential(A, out.b));
  return out;
}

/// ℱ⁰_A(a, b) = G_A(∗[a, ∗b]) for horizontal a, b. `threshold` bounds the
/// relative interior codifferential of each input.
template <int N>
FormField<N> orbit_curvature(const Connection<N>& A, const FormField<N>& a, const FormField<N>& b,
                             const SolverConfig& cfg = {}, double threshold = 1e-6) {
  for (const auto* x : {&a, &b}) {
    const double scale = std::max(l2_norm(*x), 1e-300);
    const double r = interior_norm(covariant_codifferential(A, *x)) / scale;
    if (r > threshold) throw PreconditionError("orbit_curvature needs horizontal directions", r, threshold);
  }
  return dirichlet_green(A, hodge_star(graded_commutator(a, hodge_star(b))), cfg);
}

/// Kernel of d on 0-forms at A = 0: the su(n) basis times the products of
/// (−1)^i over subsets of the even-count periodic axes, normalized in the
/// weighted inner product.
template <int N>
std::vector<FormField<N>> flat_kernel(const Mesh& mesh) {
  std::vector<int> axes;
  for (int i = 0; i < mesh.dim(); ++i)
    if (mesh.topology(i) == Topology::periodic && mesh.count(i) % 2 == 0) axes.push_back(i);
  double vol = 0.0;
  for (std::size_t n = 0; n < mesh.node_count(); ++n) vol += mesh.weight(n);
  std::vector<FormField<N>> out;
  for (unsigned s = 0; s < (1u << axes.size()); ++s)
    for (const auto& e : su_basis<N>()) {
      FormField<N> k(mesh, 0);
      for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        int sign = 1;
        for (std::size_t j = 0; j < axes.size(); ++j)
          if ((s >> j) & 1u) sign *= (mesh.index_along(n, axes[j]) % 2) ? -1 : 1;
        k.at(n, 0) = (sign / std::sqrt(vol)) * e;
      }
      out.push_back(std::move(k));
    }
  return out;
}

template <int N>
void project_out(FormField<N>& f, const std::vector<FormField<N>>& kernel) {
  for (const auto& k : kernel) f.axpy(-frobenius_inner(k, f), k);
}

/// Solves the Neumann problem in weak form, δ_A d_A g = δ_A v + f, whose
/// boundary rows impose (d_A g − v)·n = 0. With f = 0 this is the
/// homogeneous-interior solve with flux data from v. At A = 0 the kernel of
/// d is projected out of the data and the solution, and source data with a
/// kernel component above `cfg.tol` relative are rejected.
template <int N>
FormField<N> neumann_green(const Connection<N>& A, const FormField<N>& v, const std::optional<std::type_identity_t<FormField<N>>>& f,
                           const SolverConfig& cfg = {}, SolveStats* stats = nullptr) {
  if (A.mesh().closed()) throw Error("Neumann problems need a cylinder mesh");
  if (v.degree() != 1) throw DegreeError("Neumann flux data is a 1-form");
  if (v.mesh() != A.mesh() || (f && f->mesh() != A.mesh())) throw MismatchError("fields live on different meshes");
  FormField<N> rhs = covariant_codifferential(A, v);
  std::vector<FormField<N>> kernel;
  if (max_abs(A.form()) == 0.0) kernel = flat_kernel<N>(A.mesh());
  if (f) {
    if (f->degree() != 0) throw DegreeError("Neumann source is a 0-form");
    double imbalance = 0.0;
    for (const auto& k : kernel) imbalance = std::max(imbalance, std::abs(frobenius_inner(k, *f)));
    const double scale = std::max(l2_norm(*f), 1e-300);
    if (imbalance > cfg.tol * scale) throw PreconditionError("incompatible Neumann data", imbalance / scale, cfg.tol);
    rhs += *f;
  }
  const auto diag = detail::laplacian_diagonal<N>(A.mesh(), 0);
  const auto restrict = [&](FormField<N>& x) { project_out(x, kernel); };
  const auto apply = [&](const FormField<N>& x) { return laplacian0_apply(A, x); };
  return conjugate_gradient<N>(apply, rhs, &diag, restrict, cfg, stats);
}

/// Largest |(d_A g)_t − v_t| on the boundary slices. The normal derivative
/// is a second-order one-sided difference over nodes 0, 2, 4 from the end:
/// the wide interior stencil leaves an O(h²) odd-even component in g, which
/// would put an O(h) error into a difference over adjacent nodes.
template <int N>
double neumann_flux_residual(const Connection<N>& A, const FormField<N>& g, const FormField<N>& v) {
  const Mesh& m = g.mesh();
  const int k = m.interval_axis();
  if (k < 0) throw Error("neumann_flux_residual needs a cylinder mesh");
  const std::size_t s = m.stride(k);
  const double h = m.spacing(k);
  double worst = 0.0;
  for (std::size_t n = 0; n < m.node_count(); ++n) {
    const int t = m.index_along(n, k);
    if (t != 0 && t != m.count(k)) continue;
    Mat<N> dn;
    if (t == 0)
      dn = (-3.0 * g.at(n, 0) + 4.0 * g.at(n + 2 * s, 0) - g.at(n + 4 * s, 0)) / (4 * h);
    else
      dn = (3.0 * g.at(n, 0) - 4.0 * g.at(n - 2 * s, 0) + g.at(n - 4 * s, 0)) / (4 * h);
    dn += commutator<N>(A.form().at(n, k), g.at(n, 0));
    worst = std::max(worst, (dn - v.at(n, k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

template <int N>
struct GaugeFixResult {
  FormField<N> eta;  ///< Neumann potential of b
  FormField<N> c;    ///< b − d_Aη
  SolveStats stats;
};

/// b = d_Aη + c with η the Neumann solve for flux data b, so that c has
/// vanishing normal component in the weak sense.
template <int N>
GaugeFixResult<N> neumann_gauge_fix(const Connection<N>& A, const FormField<N>& b, const SolverConfig& cfg = {}) {
  GaugeFixResult<N> out;
  out.eta = neumann_green(A, b, std::nullopt, cfg, &out.stats);
  out.c = b - covariant_d(A, out.eta);
  return out;
}

/// K_A(α) = α + δ_A G_A(α∧α), with G_A the Dirichlet solve on 2-forms.
template <int N>
FormField<N> kuranishi(const Connection<N>& A, const FormField<N>& alpha, const SolverConfig& cfg = {},
                       SolveStats* stats = nullptr) {
  if (alpha.degree() != 1) throw DegreeError("kuranishi expects a 1-form");
  const FormField<N> aa = wedge(alpha, alpha);
  FormField<N> out = alpha;
  if (max_abs(aa) == 0.0) {
    if (stats) *stats = {};
    return out;
  }
  out += covariant_codifferential(A, dirichlet_solve(A, aa, cfg, stats));
  return out;
}

// ---------------------------------------------------------------------------
// Dense oracle.

/// Unknowns of a dense solve: one real coordinate per (node, direction).
template <int N>
struct DenseSpace {
  Mesh mesh;
  int degree = 0;
  std::vector<Mat<N>> directions;  ///< orthonormal under tr(X†Y)
  std::vector<std::size_t> nodes;

  std::size_t size() const { return nodes.size() * directions.size() * components(); }
  int components() const { return combinatorics::binomial(mesh.dim(), degree); }

  FormField<N> field(const Eigen::VectorXd& x) const {
    FormField<N> f(mesh, degree);
    std::size_t j = 0;
    for (std::size_t n : nodes)
      for (int c = 0; c < components(); ++c)
        for (const auto& e : directions) f.at(n, c) += x[j++] * e;
    return f;
  }
  /// Coordinates of ⟨e_j, f⟩ in the weighted inner product.
  Eigen::VectorXd dual(const FormField<N>& f) const {
    Eigen::VectorXd y(size());
    std::size_t j = 0;
    for (std::size_t n : nodes)
      for (int c = 0; c < components(); ++c)
        for (const auto& e : directions)
          y[j++] = mesh.weight(n) * (e.adjoint() * f.at(n, c)).trace().real();
    return y;
  }
};

inline constexpr std::size_t kDenseLimit = 6000;

/// Gram matrix ⟨e_i, op(e_j)⟩ of an operator on a dense space.
template <int N, class Op>
Eigen::MatrixXd dense_matrix(const DenseSpace<N>& space, Op&& op) {
  const std::size_t n = space.size();
  if (n > kDenseLimit) throw Error("dense oracle limited to " + std::to_string(kDenseLimit) + " unknowns");
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    m.col(j) = space.dual(op(space.field(e)));
    e[j] = 0.0;
  }
  return 0.5 * (m + m.transpose());
}

template <int N>
DenseSpace<N> interior_space(const Mesh& mesh, int degree, std::vector<Mat<N>> directions) {
  DenseSpace<N> s{mesh, degree, std::move(directions), {}};
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    if (!mesh.on_boundary(n)) s.nodes.push_back(n);
  return s;
}

template <int N>
DenseSpace<N> full_space(const Mesh& mesh, int degree, std::vector<Mat<N>> directions) {
  DenseSpace<N> s{mesh, degree, std::move(directions), {}};
  for (std::size_t n = 0; n < mesh.node_count(); ++n) s.nodes.push_back(n);
  return s;
}

template <int N>
std::vector<Mat<N>> all_directions() {
  const auto& b = su_basis<N>();
  return std::vector<Mat<N>>(b.begin(), b.end());
}

/// Direct solve of the Dirichlet problem restricted to `directions`.
template <int N>
FormField<N> dense_dirichlet(const Connection<N>& A, const FormField<N>& f,
                             std::vector<Mat<N>> directions = all_directions<N>()) {
  const DenseSpace<N> space = interior_space<N>(f.mesh(), f.degree(), std::move(directions));
  const Eigen::MatrixXd m = dense_matrix(space, [&](const FormField<N>& x) { return hodge_laplacian_apply(A, x); });
  return space.field(m.ldlt().solve(space.dual(f)));
}

/// Direct least-squares solve of the weak Neumann problem; at A = 0 the
/// kernel is projected out afterwards, as in neumann_green.
template <int N>
FormField<N> dense_neumann(const Connection<N>& A, const FormField<N>& v, const std::optional<std::type_identity_t<FormField<N>>>& f,
                           std::vector<Mat<N>> directions = all_directions<N>()) {
  const DenseSpace<N> space = full_space<N>(v.mesh(), 0, std::move(directions));
  const Eigen::MatrixXd m = dense_matrix(space, [&](const FormField<N>& x) { return laplacian0_apply(A, x); });
  FormField<N> rhs = covariant_codifferential(A, v);
  if (f) rhs += *f;
  FormField<N> g = space.field(m.completeOrthogonalDecomposition().solve(space.dual(rhs)));
  if (max_abs(A.form()) == 0.0) project_out(g, flat_kernel<N>(v.mesh()));
  return g;
}

}  // namespace gaugeforms
