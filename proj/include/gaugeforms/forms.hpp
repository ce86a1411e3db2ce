#pragma once

// Matrix-valued p-form fields on a Mesh and the finite-difference calculus on
// them: exterior derivative, its weighted adjoint, wedge, Hodge star,
// integration and boundary restriction.
//
// Derivatives. Periodic axes use the centered stencil of the mesh's order
// (2 or 4). An interval axis uses the summation-by-parts first derivative
//   D u_0 = (u_1 − u_0)/h,  D u_i = (u_{i+1} − u_{i−1})/2h,  D u_L = (u_L − u_{L−1})/h
// together with trapezoid weights W, so that Σ W (Du) v + Σ W u (Dv) equals
// the boundary term u_L v_L − u_0 v_0 exactly. The codifferential is the
// W-adjoint of d, which makes ⟨dα, β⟩ = ⟨α, δβ⟩ an exact discrete identity.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <vector>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/lie.hpp"
#include "gaugeforms/mesh.hpp"

namespace gaugeforms {

// ---------------------------------------------------------------------------
// Index combinatorics. A component of a p-form is an increasing index tuple,
// stored as a bitmask; components are ordered lexicographically by tuple.

namespace combinatorics {

inline int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline int popcount(unsigned m) { return __builtin_popcount(m); }

/// Components of degree p in dimension d, lexicographic.
inline const std::vector<unsigned>& combos(int d, int p) {
  static const auto table = [] {
    std::array<std::array<std::vector<unsigned>, kMaxDim + 1>, kMaxDim + 1> t;
    for (int dim = 0; dim <= kMaxDim; ++dim) {
      for (int deg = 0; deg <= dim; ++deg) {
        std::vector<unsigned> out;
        // Recursive lexicographic generation.
        std::vector<int> cur;
        auto rec = [&](auto&& self, int start) -> void {
          if (static_cast<int>(cur.size()) == deg) {
            unsigned m = 0;
            for (int i : cur) m |= 1u << i;
            out.push_back(m);
            return;
          }
          for (int i = start; i < dim; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
          }
        };
        rec(rec, 0);
        t[dim][deg] = out;
      }
    }
    return t;
  }();
  return table[d][p];
}

/// Position of a component mask in combos(d, popcount(mask)).
inline int index_of(int d, unsigned mask) {
  const auto& c = combos(d, popcount(mask));
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] == mask) return static_cast<int>(i);
  throw DegreeError("index combination out of range");
}

inline std::vector<int> indices(unsigned mask) {
  std::vector<int> v;
  for (int i = 0; i < kMaxDim; ++i)
    if (mask & (1u << i)) v.push_back(i);
  return v;
}

/// Sign of dx^I ∧ dx^J relative to dx^{I∪J} for disjoint I, J.
inline double concat_sign(unsigned i, unsigned j) {
  int inversions = 0;
  for (int a = 0; a < kMaxDim; ++a) {
    if (!(i & (1u << a))) continue;
    for (int b = 0; b < a; ++b)
      if (j & (1u << b)) ++inversions;
  }
  return (inversions % 2) ? -1.0 : 1.0;
}

struct WedgeEntry {
  int out;
  int left;
  int right;
  double sign;
};

/// Nonzero terms of (α∧β)_K = Σ sign·α_I β_J for degrees p, q in dimension d.
inline const std::vector<WedgeEntry>& wedge_table(int d, int p, int q) {
  static std::mutex mu;
  static std::map<std::array<int, 3>, std::vector<WedgeEntry>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.try_emplace({d, p, q});
  if (inserted) {
    const auto& ci = combos(d, p);
    const auto& cj = combos(d, q);
    for (std::size_t a = 0; a < ci.size(); ++a)
      for (std::size_t b = 0; b < cj.size(); ++b) {
        if (ci[a] & cj[b]) continue;
        it->second.push_back({index_of(d, ci[a] | cj[b]), static_cast<int>(a), static_cast<int>(b),
                              concat_sign(ci[a], cj[b])});
      }
  }
  return it->second;
}

struct TripleEntry {
  int first;
  int second;
  int third;
  double sign;
};

/// Terms of the top-degree coefficient of α∧β∧γ for degrees p+q+r = d.
inline const std::vector<TripleEntry>& triple_table(int d, int p, int q, int r) {
  static std::mutex mu;
  static std::map<std::array<int, 4>, std::vector<TripleEntry>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto [it, inserted] = cache.try_emplace({d, p, q, r});
  if (inserted) {
    const auto& ci = combos(d, p);
    const auto& cj = combos(d, q);
    const auto& ck = combos(d, r);
    for (std::size_t a = 0; a < ci.size(); ++a)
      for (std::size_t b = 0; b < cj.size(); ++b) {
        if (ci[a] & cj[b]) continue;
        for (std::size_t c = 0; c < ck.size(); ++c) {
          if ((ci[a] | cj[b]) & ck[c]) continue;
          it->second.push_back({static_cast<int>(a), static_cast<int>(b), static_cast<int>(c),
                                concat_sign(ci[a], cj[b]) * concat_sign(ci[a] | cj[b], ck[c])});
        }
      }
  }
  return it->second;
}

}  // namespace combinatorics

// ---------------------------------------------------------------------------

/// Deterministic pairwise sum of f(0), …, f(n−1).
template <class T, class F>
T pairwise_sum(std::size_t n, F&& f) {
  constexpr std::size_t kLeaf = 64;
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> T {
    if (hi - lo <= kLeaf) {
      T s{};
      for (std::size_t i = lo; i < hi; ++i) s += f(i);
      return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return self(self, lo, mid) + self(self, mid, hi);
  };
  return n == 0 ? T{} : rec(rec, 0, n);
}

/// A p-form with one n×n matrix per node and component. Values are stored
/// node-major: value(node, comp) = data[node·C(d,p) + comp].
template <int N>
class FormField {
 public:
  FormField() = default;
  FormField(Mesh mesh, int degree) : mesh_(std::move(mesh)), degree_(degree) {
    if (degree_ < 0 || degree_ > mesh_.dim()) throw DegreeError("form degree out of range");
    ncomp_ = combinatorics::binomial(mesh_.dim(), degree_);
    data_.assign(mesh_.node_count() * ncomp_, Mat<N>::Zero());
  }

  const Mesh& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int components() const { return ncomp_; }
  std::size_t nodes() const { return mesh_.node_count(); }

  Mat<N>& at(std::size_t node, int comp) { return data_[node * ncomp_ + comp]; }
  const Mat<N>& at(std::size_t node, int comp) const { return data_[node * ncomp_ + comp]; }
  std::vector<Mat<N>>& data() { return data_; }
  const std::vector<Mat<N>>& data() const { return data_; }

  FormField& operator+=(const FormField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  FormField& operator-=(const FormField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  FormField& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  /// this += s·o
  FormField& axpy(cplx s, const FormField& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * o.data_[i];
    return *this;
  }

  friend FormField operator+(FormField a, const FormField& b) { return a += b; }
  friend FormField operator-(FormField a, const FormField& b) { return a -= b; }
  friend FormField operator*(cplx s, FormField a) { return a *= s; }
  friend FormField operator*(double s, FormField a) { return a *= cplx(s); }
  FormField operator-() const { return cplx(-1.0) * *this; }

  void check_same(const FormField& o) const {
    if (mesh_ != o.mesh_) throw MismatchError("fields live on different meshes");
    if (degree_ != o.degree_) throw MismatchError("fields have different degrees");
  }

 private:
  Mesh mesh_;
  int degree_ = 0;
  int ncomp_ = 1;
  std::vector<Mat<N>> data_;
};

/// Samples f(x, comp) at every node. `x` holds physical coordinates.
template <int N, class F>
FormField<N> sample(const Mesh& mesh, int degree, F&& f) {
  FormField<N> out(mesh, degree);
  for (std::size_t n = 0; n < mesh.node_count(); ++n) {
    const auto x = mesh.coords(n);
    for (int c = 0; c < out.components(); ++c) out.at(n, c) = f(x, c);
  }
  return out;
}

/// Constant form with the given per-component values.
template <int N>
FormField<N> constant_form(const Mesh& mesh, int degree, const std::vector<Mat<N>>& values) {
  FormField<N> out(mesh, degree);
  if (static_cast<int>(values.size()) != out.components())
    throw MismatchError("constant_form needs one value per component");
  for (std::size_t n = 0; n < mesh.node_count(); ++n)
    for (int c = 0; c < out.components(); ++c) out.at(n, c) = values[c];
  return out;
}

/// Projects every value onto su(n); returns the largest entrywise change.
template <int N>
double project_values(FormField<N>& f) {
  double worst = 0.0;
  for (auto& v : f.data()) {
    const Mat<N> p = project_alg<N>(v);
    worst = std::max(worst, (v - p).cwiseAbs().maxCoeff());
    v = p;
  }
  return worst;
}

template <int N>
double max_alg_defect(const FormField<N>& f) {
  double worst = 0.0;
  for (const auto& v : f.data()) worst = std::max(worst, alg_defect<N>(v));
  return worst;
}

template <int N>
double max_abs(const FormField<N>& f) {
  double worst = 0.0;
  for (const auto& v : f.data()) worst = std::max(worst, v.cwiseAbs().maxCoeff());
  return worst;
}

// ---------------------------------------------------------------------------
// One-dimensional derivative kernels applied along an axis.

namespace detail {

/// Calls f(first_node, length) for every grid line along `axis`; nodes on a
/// line are first_node + i·stride(axis).
template <class F>
void for_each_line(const Mesh& mesh, int axis, F&& f) {
  const std::size_t stride = mesh.stride(axis);
  const std::size_t len = static_cast<std::size_t>(mesh.nodes_along(axis));
  const std::size_t block = stride * len;
  for (std::size_t outer = 0; outer < mesh.node_count(); outer += block)
    for (std::size_t inner = 0; inner < stride; ++inner) f(outer + inner, static_cast<int>(len));
}

/// dst += scale · D src along `axis` (or the W-adjoint D* when `adjoint`).
/// src/dst point at one component; consecutive nodes are `ss`/`ds` matrices
/// apart.
template <int N>
void derivative_accumulate(const Mesh& mesh, int axis, const Mat<N>* src, int ss, Mat<N>* dst,
                           int ds, double scale, bool adjoint) {
  const double h = mesh.spacing(axis);
  const std::size_t stride = mesh.stride(axis);
  const auto S = [&](std::size_t node) -> const Mat<N>& { return src[node * ss]; };
  const auto D = [&](std::size_t node) -> Mat<N>& { return dst[node * ds]; };

  if (mesh.topology(axis) == Topology::periodic) {
    // Centered stencils are antisymmetric, so D* = −D.
    const double s = adjoint ? -scale : scale;
    const int order = mesh.stencil_order();
    for_each_line(mesh, axis, [&](std::size_t first, int len) {
      for (int i = 0; i < len; ++i) {
        const std::size_t n = first + i * stride;
        const auto at = [&](int k) { return first + static_cast<std::size_t>(((i + k) % len + len) % len) * stride; };
        if (order == 2) {
          D(n) += (s / (2.0 * h)) * (S(at(1)) - S(at(-1)));
        } else {
          D(n) += (s / (12.0 * h)) * (8.0 * (S(at(1)) - S(at(-1))) - (S(at(2)) - S(at(-2))));
        }
      }
    });
    return;
  }

  for_each_line(mesh, axis, [&](std::size_t first, int len) {
    const int last = len - 1;
    const auto node = [&](int i) { return first + static_cast<std::size_t>(i) * stride; };
    if (!adjoint) {
      D(node(0)) += (scale / h) * (S(node(1)) - S(node(0)));
      for (int i = 1; i < last; ++i) D(node(i)) += (scale / (2.0 * h)) * (S(node(i + 1)) - S(node(i - 1)));
      D(node(last)) += (scale / h) * (S(node(last)) - S(node(last - 1)));
    } else {
      // Rows of W⁻¹DᵀW for the operator above (len ≥ 5).
      D(node(0)) += (-scale / h) * (S(node(0)) + S(node(1)));
      D(node(1)) += (scale / (2.0 * h)) * (S(node(0)) - S(node(2)));
      for (int i = 2; i < last - 1; ++i) D(node(i)) += (scale / (2.0 * h)) * (S(node(i - 1)) - S(node(i + 1)));
      D(node(last - 1)) += (scale / (2.0 * h)) * (S(node(last - 2)) - S(node(last)));
      D(node(last)) += (scale / h) * (S(node(last - 1)) + S(node(last)));
    }
  });
}

}  // namespace detail

/// Componentwise derivative along one axis of every component of f.
template <int N>
FormField<N> partial(const FormField<N>& f, int axis) {
  FormField<N> out(f.mesh(), f.degree());
  const int nc = f.components();
  for (int c = 0; c < nc; ++c)
    detail::derivative_accumulate<N>(f.mesh(), axis, f.data().data() + c, nc, out.data().data() + c, nc,
                                     1.0, false);
  return out;
}

/// (dω)_J = Σ_m (−1)^m ∂_{j_m} ω_{J∖j_m}.
template <int N>
FormField<N> exterior_d(const FormField<N>& w) {
  const Mesh& mesh = w.mesh();
  const int d = mesh.dim();
  if (w.degree() >= d) throw DegreeError("exterior_d of a top-degree form");
  FormField<N> out(mesh, w.degree() + 1);
  const auto& outc = combinatorics::combos(d, w.degree() + 1);
  const int ns = w.components();
  const int no = out.components();
  for (int j = 0; j < no; ++j) {
    const auto idx = combinatorics::indices(outc[j]);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const int src = combinatorics::index_of(d, outc[j] & ~(1u << idx[m]));
      detail::derivative_accumulate<N>(mesh, idx[m], w.data().data() + src, ns, out.data().data() + j, no,
                                       (m % 2) ? -1.0 : 1.0, false);
    }
  }
  return out;
}

/// Weighted adjoint of exterior_d: l2_inner(dα, β) = l2_inner(α, δβ) exactly.
/// On periodic meshes this coincides with ±∗d∗.
template <int N>
FormField<N> codifferential(const FormField<N>& b) {
  const Mesh& mesh = b.mesh();
  const int d = mesh.dim();
  if (b.degree() == 0) throw DegreeError("codifferential of a 0-form");
  FormField<N> out(mesh, b.degree() - 1);
  const auto& inc = combinatorics::combos(d, b.degree());
  const int ns = b.components();
  const int no = out.components();
  for (int j = 0; j < ns; ++j) {
    const auto idx = combinatorics::indices(inc[j]);
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const int dst = combinatorics::index_of(d, inc[j] & ~(1u << idx[m]));
      detail::derivative_accumulate<N>(mesh, idx[m], b.data().data() + j, ns, out.data().data() + dst, no,
                                       (m % 2) ? -1.0 : 1.0, true);
    }
  }
  return out;
}

/// Pointwise α∧β with ordered matrix products.
template <int N>
FormField<N> wedge(const FormField<N>& a, const FormField<N>& b) {
  if (a.mesh() != b.mesh()) throw MismatchError("wedge operands live on different meshes");
  const int d = a.mesh().dim();
  if (a.degree() + b.degree() > d) throw DegreeError("wedge degree exceeds dimension");
  FormField<N> out(a.mesh(), a.degree() + b.degree());
  const auto& table = combinatorics::wedge_table(d, a.degree(), b.degree());
  for (std::size_t n = 0; n < a.nodes(); ++n)
    for (const auto& e : table) out.at(n, e.out).noalias() += e.sign * (a.at(n, e.left) * b.at(n, e.right));
  return out;
}

/// α∧β − (−1)^{pq} β∧α, the graded commutator [α∧β].
template <int N>
FormField<N> graded_commutator(const FormField<N>& a, const FormField<N>& b) {
  FormField<N> out = wedge(a, b);
  const double s = ((a.degree() * b.degree()) % 2) ? -1.0 : 1.0;
  return out.axpy(-s, wedge(b, a));
}

/// Multiplies a p-form by a 0-form on the left (f·ω) or right (ω·f).
template <int N>
FormField<N> multiply(const FormField<N>& f, const FormField<N>& w, bool f_on_left = true) {
  if (f.degree() != 0) throw DegreeError("multiply expects a 0-form factor");
  if (f.mesh() != w.mesh()) throw MismatchError("multiply operands live on different meshes");
  FormField<N> out(w.mesh(), w.degree());
  for (std::size_t n = 0; n < w.nodes(); ++n)
    for (int c = 0; c < w.components(); ++c)
      out.at(n, c) = f_on_left ? Mat<N>(f.at(n, 0) * w.at(n, c)) : Mat<N>(w.at(n, c) * f.at(n, 0));
  return out;
}

/// Flat-metric Hodge star in physical coordinates: ∗dx^I = sign(I, Iᶜ) dx^{Iᶜ}.
template <int N>
FormField<N> hodge_star(const FormField<N>& w) {
  const int d = w.mesh().dim();
  FormField<N> out(w.mesh(), d - w.degree());
  const auto& inc = combinatorics::combos(d, w.degree());
  const unsigned full = (1u << d) - 1u;
  for (std::size_t c = 0; c < inc.size(); ++c) {
    const unsigned comp = full & ~inc[c];
    const int oc = combinatorics::index_of(d, comp);
    const double s = combinatorics::concat_sign(inc[c], comp);
    for (std::size_t n = 0; n < w.nodes(); ++n) out.at(n, oc) = s * w.at(n, static_cast<int>(c));
  }
  return out;
}

/// Σ_nodes weight·tr(ω) for a top-degree form.
template <int N>
cplx integrate_trace(const FormField<N>& w) {
  if (w.degree() != w.mesh().dim()) throw DegreeError("integrate_trace needs a top-degree form");
  const Mesh& m = w.mesh();
  return pairwise_sum<cplx>(w.nodes(), [&](std::size_t n) { return m.weight(n) * w.at(n, 0).trace(); });
}

/// ∫ tr(α∧β) for deg α + deg β = dim, without forming α∧β.
template <int N>
cplx integrate_wedge_trace(const FormField<N>& a, const FormField<N>& b) {
  if (a.mesh() != b.mesh()) throw MismatchError("operands live on different meshes");
  const int d = a.mesh().dim();
  if (a.degree() + b.degree() != d) throw DegreeError("integrate_wedge_trace needs complementary degrees");
  const auto& table = combinatorics::wedge_table(d, a.degree(), b.degree());
  const Mesh& m = a.mesh();
  return pairwise_sum<cplx>(a.nodes(), [&](std::size_t n) {
    cplx s = 0.0;
    for (const auto& e : table) s += e.sign * trace_pair<N>(a.at(n, e.left), b.at(n, e.right));
    return m.weight(n) * s;
  });
}

/// ∫ tr(α∧β∧γ) for degrees summing to dim, without intermediate fields.
template <int N>
cplx integrate_wedge3_trace(const FormField<N>& a, const FormField<N>& b, const FormField<N>& c) {
  if (a.mesh() != b.mesh() || a.mesh() != c.mesh()) throw MismatchError("operands live on different meshes");
  const int d = a.mesh().dim();
  if (a.degree() + b.degree() + c.degree() != d)
    throw DegreeError("integrate_wedge3_trace needs degrees summing to the dimension");
  const auto& table = combinatorics::triple_table(d, a.degree(), b.degree(), c.degree());
  const Mesh& m = a.mesh();
  return pairwise_sum<cplx>(a.nodes(), [&](std::size_t n) {
    cplx s = 0.0;
    for (const auto& e : table) s += e.sign * trace_pair<N>(Mat<N>(a.at(n, e.first) * b.at(n, e.second)), c.at(n, e.third));
    return m.weight(n) * s;
  });
}

/// −∫ tr(α∧∗β) = −Σ_I ∫ tr(α_I β_I). Real and positive definite on su(n)
/// values.
template <int N>
cplx l2_inner(const FormField<N>& a, const FormField<N>& b) {
  a.check_same(b);
  const Mesh& m = a.mesh();
  const int nc = a.components();
  return pairwise_sum<cplx>(a.nodes(), [&](std::size_t n) {
    cplx s = 0.0;
    for (int c = 0; c < nc; ++c) s -= trace_pair<N>(a.at(n, c), b.at(n, c));
    return m.weight(n) * s;
  });
}

/// Weighted real inner product Re Σ w tr(α_I† β_I); agrees with l2_inner on
/// su(n) values and stays positive definite on arbitrary matrices.
template <int N>
double frobenius_inner(const FormField<N>& a, const FormField<N>& b) {
  a.check_same(b);
  const Mesh& m = a.mesh();
  const int nc = a.components();
  return pairwise_sum<double>(a.nodes(), [&](std::size_t n) {
    double s = 0.0;
    for (int c = 0; c < nc; ++c) s += (a.at(n, c).conjugate().array() * b.at(n, c).array()).sum().real();
    return m.weight(n) * s;
  });
}

template <int N>
double l2_norm(const FormField<N>& a) {
  return std::sqrt(std::max(0.0, frobenius_inner(a, a)));
}

// ---------------------------------------------------------------------------
// Boundary restriction on cylinders.

template <int N>
struct BoundarySlice {
  Mesh mesh;       ///< the slice, with the interval axis removed
  double sign;     ///< induced orientation relative to the slice's axis order
  double position; ///< value of the interval coordinate
  FormField<N> field;
};

template <int N>
struct OrientedBoundary {
  std::vector<BoundarySlice<N>> slices;
};

/// Tangential components of ω on the two end slices of the interval axis.
/// With the outward normal first, the slice at the far end has sign (−1)^k
/// and the near end −(−1)^k for interval axis k, so that
/// ∫ dω = Σ sign·∫ restriction holds for the discrete operators.
template <int N>
OrientedBoundary<N> boundary_restrict(const FormField<N>& w) {
  OrientedBoundary<N> out;
  const Mesh& m = w.mesh();
  const int k = m.interval_axis();
  if (k < 0) return out;
  const int d = m.dim();
  const Mesh slice = m.without_axis(k);
  const auto& comps = combinatorics::combos(d, w.degree());
  // Map full components without axis k to slice components.
  std::vector<std::pair<int, int>> map;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    if (comps[c] & (1u << k)) continue;
    const unsigned low = comps[c] & ((1u << k) - 1u);
    const unsigned high = (comps[c] >> (k + 1)) << k;
    map.emplace_back(static_cast<int>(c), combinatorics::index_of(d - 1, low | high));
  }
  const double orient = (k % 2) ? -1.0 : 1.0;
  for (int end = 0; end < 2; ++end) {
    const int t = end == 0 ? 0 : m.count(k);
    FormField<N> f(slice, w.degree());
    for (std::size_t s = 0; s < slice.node_count(); ++s) {
      const auto si = slice.multi_index(s);
      std::array<int, kMaxDim> full{};
      for (int i = 0, j = 0; i < d; ++i) full[i] = (i == k) ? t : si[j++];
      const std::size_t n = m.node_at(full);
      for (const auto& [src, dst] : map) f.at(s, dst) = w.at(n, src);
    }
    out.slices.push_back({slice, end == 0 ? -orient : orient, t * m.spacing(k), std::move(f)});
  }
  return out;
}

}  // namespace gaugeforms
