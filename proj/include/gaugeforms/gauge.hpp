#pragma once

// Connections, curvature, the gauge action and holonomy diagnostics.

#include <algorithm>
#include <functional>
#include <vector>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/forms.hpp"
#include "gaugeforms/lie.hpp"
#include "gaugeforms/mesh.hpp"

namespace gaugeforms {

/// Largest distance removed by su(n) re-projection since the last reset, on
/// this thread. Results that are algebraically in su(n) (curvature of an
/// su(n) connection) only lose roundoff; group-derived fields such as
/// g⁻¹dg lose a stencil-sized amount, since the discrete derivative does not
/// obey the product rule exactly.
class ProjectionAudit {
 public:
  static void reset() { value() = 0.0; }
  static double max_distance() { return value(); }
  static void record(double d) { value() = std::max(value(), d); }

 private:
  static double& value() {
    thread_local double v = 0.0;
    return v;
  }
};

/// An su(n)-valued 1-form.
template <int N>
class Connection {
 public:
  Connection() = default;
  explicit Connection(FormField<N> a) : a_(std::move(a)) {
    if (a_.degree() != 1) throw DegreeError("a connection is a 1-form");
  }
  static Connection zero(const Mesh& mesh) { return Connection(FormField<N>(mesh, 1)); }

  const FormField<N>& form() const { return a_; }
  FormField<N>& form() { return a_; }
  const Mesh& mesh() const { return a_.mesh(); }

  /// A + s·a
  Connection shifted(cplx s, const FormField<N>& dir) const {
    Connection out = *this;
    out.a_.axpy(s, dir);
    return out;
  }

 private:
  FormField<N> a_;
};

/// An SU(n)-valued function on the nodes of a mesh.
template <int N>
class GaugeMap {
 public:
  GaugeMap() = default;
  GaugeMap(Mesh mesh, std::vector<Mat<N>> values, double tolerance = 1e-10)
      : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (values_.size() != mesh_.node_count()) throw MismatchError("gauge map needs one value per node");
    if (tolerance > 0.0 && max_group_defect() > tolerance)
      throw PreconditionError("gauge map values are not special unitary", max_group_defect(), tolerance);
  }

  static GaugeMap identity(const Mesh& mesh) {
    return GaugeMap(mesh, std::vector<Mat<N>>(mesh.node_count(), Mat<N>::Identity()), 0.0);
  }

  const Mesh& mesh() const { return mesh_; }
  const Mat<N>& at(std::size_t node) const { return values_[node]; }
  const std::vector<Mat<N>>& values() const { return values_; }

  /// g at the first node equals the identity.
  bool based() const { return (values_.front() - Mat<N>::Identity()).cwiseAbs().maxCoeff() <= 1e-10; }

  double max_group_defect() const {
    double w = 0.0;
    for (const auto& g : values_) w = std::max(w, group_defect<N>(g));
    return w;
  }

  /// The values as a 0-form, for applying difference stencils.
  FormField<N> as_form() const {
    FormField<N> f(mesh_, 0);
    for (std::size_t n = 0; n < values_.size(); ++n) f.at(n, 0) = values_[n];
    return f;
  }

 private:
  Mesh mesh_;
  std::vector<Mat<N>> values_;
};

/// Pointwise product (g f)(x) = g(x) f(x).
template <int N>
GaugeMap<N> compose(const GaugeMap<N>& g, const GaugeMap<N>& f) {
  if (g.mesh() != f.mesh()) throw MismatchError("gauge maps live on different meshes");
  std::vector<Mat<N>> v(g.values().size());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = g.at(n) * f.at(n);
  return GaugeMap<N>(g.mesh(), std::move(v), 0.0);
}

/// Pointwise exp of an su(n) 0-form.
template <int N>
GaugeMap<N> exp_map(const FormField<N>& xi) {
  if (xi.degree() != 0) throw DegreeError("exp_map expects a 0-form");
  std::vector<Mat<N>> v(xi.nodes());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = su_exponential<N>(xi.at(n, 0));
  return GaugeMap<N>(xi.mesh(), std::move(v), 0.0);
}

/// Samples g(x) at every node.
template <int N, class F>
GaugeMap<N> sample_gauge(const Mesh& mesh, F&& g) {
  std::vector<Mat<N>> v(mesh.node_count());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = g(mesh.coords(n));
  return GaugeMap<N>(mesh, std::move(v));
}

namespace detail {
template <int N>
double project_and_record(FormField<N>& f) {
  const double d = project_values(f);
  ProjectionAudit::record(d);
  return d;
}
}  // namespace detail

/// F = dA + A∧A, projected to su(n).
template <int N>
FormField<N> curvature(const Connection<N>& a) {
  FormField<N> f = exterior_d(a.form());
  f += wedge(a.form(), a.form());
  detail::project_and_record(f);
  return f;
}

/// g⁻¹dg with dg from the mesh stencil, projected to su(n).
template <int N>
Connection<N> pure_gauge(const GaugeMap<N>& g) {
  const Mesh& mesh = g.mesh();
  const FormField<N> dg = exterior_d(g.as_form());
  FormField<N> a(mesh, 1);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const Mat<N> inv = g.at(n).adjoint();
    for (int i = 0; i < mesh.dim(); ++i) a.at(n, i).noalias() = inv * dg.at(n, i);
  }
  detail::project_and_record(a);
  return Connection<N>(std::move(a));
}

/// g·A = g⁻¹dg + g⁻¹Ag, projected to su(n).
template <int N>
Connection<N> gauge_transform(const Connection<N>& a, const GaugeMap<N>& g) {
  if (a.mesh() != g.mesh()) throw MismatchError("connection and gauge map live on different meshes");
  const Mesh& mesh = g.mesh();
  const FormField<N> dg = exterior_d(g.as_form());
  FormField<N> out(mesh, 1);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const Mat<N> inv = g.at(n).adjoint();
    for (int i = 0; i < mesh.dim(); ++i) out.at(n, i) = inv * (dg.at(n, i) + a.form().at(n, i) * g.at(n));
  }
  detail::project_and_record(out);
  return Connection<N>(std::move(out));
}

/// d_A ω = dω + A∧ω − (−1)^p ω∧A.
template <int N>
FormField<N> covariant_d(const Connection<N>& a, const FormField<N>& w) {
  if (a.mesh() != w.mesh()) throw MismatchError("connection and form live on different meshes");
  FormField<N> out = exterior_d(w);
  out += wedge(a.form(), w);
  out.axpy((w.degree() % 2) ? 1.0 : -1.0, wedge(w, a.form()));
  return out;
}

/// Weighted adjoint of covariant_d for the pairing l2_inner:
/// (δ_A β)_I = Σ_{j∉I} ±(D_j* β_{I∪j} − [A_j, β_{I∪j}]).
template <int N>
FormField<N> covariant_codifferential(const Connection<N>& a, const FormField<N>& b) {
  if (a.mesh() != b.mesh()) throw MismatchError("connection and form live on different meshes");
  FormField<N> out = codifferential(b);
  const Mesh& mesh = b.mesh();
  const int d = mesh.dim();
  const auto& inc = combinatorics::combos(d, b.degree());
  for (std::size_t j = 0; j < inc.size(); ++j) {
    const auto idx = combinatorics::indices(inc[j]);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const int dst = combinatorics::index_of(d, inc[j] & ~(1u << idx[m]));
      const double s = (m % 2) ? 1.0 : -1.0;
      for (std::size_t n = 0; n < mesh.node_count(); ++n)
        out.at(n, dst) += s * commutator<N>(a.form().at(n, idx[m]), b.at(n, static_cast<int>(j)));
    }
  }
  return out;
}

/// Fundamental vector field of ξ at A: d_A ξ.
template <int N>
FormField<N> infinitesimal_action(const Connection<N>& a, const FormField<N>& xi) {
  if (xi.degree() != 0) throw DegreeError("infinitesimal_action expects a 0-form");
  return covariant_d(a, xi);
}

/// sqrt(l2_inner(F, F)).
template <int N>
double flatness_residual(const Connection<N>& a) {
  const FormField<N> f = curvature(a);
  return std::sqrt(std::max(0.0, l2_inner(f, f).real()));
}

/// Ramp with vanishing first and second derivatives at both ends.
inline double smootherstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }

/// Cylinder [0,1]×M with `t_count` cells along the new first axis.
inline Mesh cylinder_over(const Mesh& slice, int t_count) {
  std::vector<int> c{t_count};
  std::vector<double> e{1.0};
  std::vector<Topology> t{Topology::interval};
  for (int i = 0; i < slice.dim(); ++i) {
    c.push_back(slice.count(i));
    e.push_back(slice.extent(i));
    t.push_back(slice.topology(i));
  }
  return Mesh(c, e, t, slice.stencil_order());
}

/// G(t,x) = exp(φ(t) ξ(x)) on [0,1]×M.
template <int N>
GaugeMap<N> exp_ramp(const FormField<N>& xi, int t_count, const std::function<double(double)>& phi = smootherstep) {
  if (xi.degree() != 0) throw DegreeError("exp_ramp expects a 0-form");
  const Mesh slice = xi.mesh();
  if (!slice.closed()) throw Error("exp_ramp expects data on a closed mesh");
  const Mesh mesh = cylinder_over(slice, t_count);
  std::vector<Mat<N>> v(mesh.node_count());
  const std::size_t per_slice = slice.node_count();
  for (int t = 0; t <= t_count; ++t) {
    const double s = phi(t * mesh.spacing(0));
    for (std::size_t n = 0; n < per_slice; ++n)
      v[t * per_slice + n] = su_exponential<N>(Mat<N>(s * xi.at(n, 0)));
  }
  return GaugeMap<N>(mesh, std::move(v), 0.0);
}

/// Flat connection G⁻¹dG on [0,1]×M extending 0 at t = 0 and
/// pure_gauge(exp ξ) at t = 1, with G = exp(φ(t)ξ).
template <int N>
Connection<N> flat_extend_exp(const FormField<N>& xi, int t_count,
                              const std::function<double(double)>& phi = smootherstep) {
  return pure_gauge(exp_ramp(xi, t_count, phi));
}

/// Holonomy around the size×size square spanned by axes i < j from `node`,
/// with edge transports exp(−h·Ā) (Ā the average of the endpoint values),
/// composed with later edges on the left. For size 1 this approximates
/// exp(−h_i h_j F_ij).
template <int N>
Mat<N> loop_holonomy(const Connection<N>& a, std::size_t node, int i, int j, int size = 1) {
  const Mesh& mesh = a.mesh();
  if (i < 0 || j < 0 || i >= mesh.dim() || j >= mesh.dim() || i == j || size < 1)
    throw Error("invalid holonomy axes");
  if (node >= mesh.node_count()) throw Error("invalid holonomy node");
  for (int ax : {i, j})
    if (mesh.topology(ax) == Topology::interval && mesh.index_along(node, ax) + size > mesh.count(ax))
      throw Error("holonomy loop leaves the mesh");
  const auto step = [&](std::size_t n, int axis) {
    return mesh.topology(axis) == Topology::periodic ? mesh.shifted(n, axis, 1) : n + mesh.stride(axis);
  };
  // Transport along +axis from n, or its inverse.
  const auto edge = [&](std::size_t n, int axis) {
    const std::size_t m = step(n, axis);
    return su_exponential<N>(Mat<N>(-0.5 * mesh.spacing(axis) * (a.form().at(n, axis) + a.form().at(m, axis))));
  };
  Mat<N> hol = Mat<N>::Identity();
  std::size_t n = node;
  for (int k = 0; k < size; ++k) { hol = edge(n, i) * hol; n = step(n, i); }
  for (int k = 0; k < size; ++k) { hol = edge(n, j) * hol; n = step(n, j); }
  // Walk back: find the predecessor along i, then j.
  std::vector<std::size_t> back_i(size), back_j(size);
  std::size_t m = node;
  for (int k = 0; k < size; ++k) m = step(m, j);
  for (int k = 0; k < size; ++k) { back_i[k] = m; m = step(m, i); }
  for (int k = size - 1; k >= 0; --k) hol = edge(back_i[k], i).adjoint() * hol;
  m = node;
  for (int k = 0; k < size; ++k) { back_j[k] = m; m = step(m, j); }
  for (int k = size - 1; k >= 0; --k) hol = edge(back_j[k], j).adjoint() * hol;
  return hol;
}

template <int N>
Mat<N> plaquette_holonomy(const Connection<N>& a, std::size_t node, int i, int j) {
  return loop_holonomy(a, node, i, j, 1);
}

}  // namespace gaugeforms
