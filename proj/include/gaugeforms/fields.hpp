#pragma once

// Analytic test field families used by the checks and the tests: random
// trigonometric/polynomial p-forms and the radial bump map T³ → SU(2).

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "gaugeforms/forms.hpp"
#include "gaugeforms/lie.hpp"
#include "gaugeforms/mesh.hpp"

namespace gaugeforms {

/// A random smooth su(n)-valued p-form. Each coefficient along each su(n)
/// basis element is a short sum of separable terms
///   c · Π_periodic cos(2πk_i x_i / L_i + φ_i) · P(t),
/// with k_i ∈ {0, 1} and P a polynomial of degree ≤ 2 on the interval axis.
/// The field is defined for a mesh shape (dim, extents, topology) and can be
/// sampled exactly on any refinement.
template <int N>
class SmoothField {
 public:
  struct Term {
    double coef;
    std::array<int, kMaxDim> mode{};
    std::array<double, kMaxDim> phase{};
    std::array<double, 3> poly{1.0, 0.0, 0.0};
  };

  SmoothField() = default;

  SmoothField(const Mesh& shape, int degree, Rng& rng, double amplitude = 0.5, int terms = 2)
      : dim_(shape.dim()), degree_(degree), extents_(shape.extents()), topology_(shape.topologies()) {
    ncomp_ = combinatorics::binomial(dim_, degree_);
    terms_.resize(static_cast<std::size_t>(ncomp_) * (N * N - 1));
    for (auto& list : terms_) {
      for (int r = 0; r < terms; ++r) {
        Term t;
        t.coef = amplitude * rng.uniform(-1.0, 1.0) / terms;
        for (int i = 0; i < dim_; ++i) {
          if (topology_[i] == Topology::periodic) {
            t.mode[i] = rng.below(2);
            t.phase[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
          } else {
            for (auto& a : t.poly) a = rng.uniform(-1.0, 1.0);
          }
        }
        list.push_back(t);
      }
    }
  }

  int degree() const { return degree_; }

  /// Multiplies the field by a scalar profile of the interval coordinate,
  /// given as polynomial coefficients (used to force boundary values).
  void set_interval_factor(std::vector<double> coeffs) { interval_factor_ = std::move(coeffs); }

  Mat<N> operator()(const std::array<double, kMaxDim>& x, int comp) const {
    Mat<N> v = Mat<N>::Zero();
    const auto& basis = su_basis<N>();
    for (int b = 0; b < N * N - 1; ++b) {
      double s = 0.0;
      for (const auto& t : terms_[comp * (N * N - 1) + b]) {
        double f = t.coef;
        for (int i = 0; i < dim_; ++i) f *= factor(t, i, x[i]);
        s += f;
      }
      v += s * basis[b];
    }
    return scale_interval(x) * v;
  }

  FormField<N> sample(const Mesh& mesh) const {
    if (mesh.dim() != dim_ || mesh.topologies() != topology_ || mesh.extents() != extents_)
      throw MismatchError("SmoothField sampled on a mesh of a different shape");
    FormField<N> out(mesh, degree_);
    const auto& basis = su_basis<N>();
    const int nb = N * N - 1;
    // Per-term, per-axis factor tables.
    std::vector<std::vector<std::array<std::vector<double>, kMaxDim>>> tables(terms_.size());
    for (std::size_t l = 0; l < terms_.size(); ++l)
      for (const auto& t : terms_[l]) {
        std::array<std::vector<double>, kMaxDim> ax;
        for (int i = 0; i < dim_; ++i) {
          ax[i].resize(mesh.nodes_along(i));
          for (int j = 0; j < mesh.nodes_along(i); ++j) ax[i][j] = factor(t, i, j * mesh.spacing(i));
        }
        tables[l].push_back(std::move(ax));
      }
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
      const auto idx = mesh.multi_index(n);
      const double scale = scale_interval(mesh.coords(n));
      for (int c = 0; c < ncomp_; ++c) {
        Mat<N> v = Mat<N>::Zero();
        for (int b = 0; b < nb; ++b) {
          const auto& list = terms_[c * nb + b];
          double s = 0.0;
          for (std::size_t r = 0; r < list.size(); ++r) {
            double f = list[r].coef;
            for (int i = 0; i < dim_; ++i) f *= tables[c * nb + b][r][i][idx[i]];
            s += f;
          }
          v += s * basis[b];
        }
        out.at(n, c) = scale * v;
      }
    }
    return out;
  }

 private:
  double factor(const Term& t, int axis, double x) const {
    if (topology_[axis] == Topology::periodic)
      return std::cos(2.0 * std::numbers::pi * t.mode[axis] * x / extents_[axis] + t.phase[axis]);
    return t.poly[0] + x * (t.poly[1] + x * t.poly[2]);
  }

  double scale_interval(const std::array<double, kMaxDim>& x) const {
    if (interval_factor_.empty()) return 1.0;
    int k = -1;
    for (int i = 0; i < dim_; ++i)
      if (topology_[i] == Topology::interval) k = i;
    if (k < 0) return 1.0;
    double s = 0.0;
    for (auto it = interval_factor_.rbegin(); it != interval_factor_.rend(); ++it) s = s * x[k] + *it;
    return s;
  }

  int dim_ = 0;
  int degree_ = 0;
  int ncomp_ = 0;
  std::vector<double> extents_;
  std::vector<Topology> topology_;
  std::vector<std::vector<Term>> terms_;
  std::vector<double> interval_factor_;
};

/// Constant-coefficient form with random su(n) values per component.
template <int N>
FormField<N> random_constant_form(const Mesh& mesh, int degree, Rng& rng, double scale = 0.5) {
  std::vector<Mat<N>> v(combinatorics::binomial(mesh.dim(), degree));
  for (auto& x : v) x = random_alg<N>(rng, scale);
  return constant_form<N>(mesh, degree, v);
}

/// Embeds an SU(2) matrix in the upper-left block of SU(n).
template <int N>
Mat<N> embed_su2(const Mat<2>& u) {
  Mat<N> g = Mat<N>::Identity();
  g.template topLeftCorner<2, 2>() = u;
  return g;
}

/// Radial bump map from a periodic 3-box to SU(2):
///   g(x) = cos φ(r) I + i sin φ(r) (x̂·σ),  φ(r) = π(1 − ψ(r/R)),
/// equal to I outside the ball of radius R and −I at the center. ψ is the
/// odd smooth step (15/8)∫₀ᵘ(1 − s²)² ds. `reflect` flips the first
/// coordinate, reversing the orientation.
struct BumpMap {
  std::array<double, 3> center{0.5, 0.5, 0.5};
  double radius = 0.5;
  bool reflect = false;
  std::array<double, 3> extents{1.0, 1.0, 1.0};

  static double step(double u) {
    if (u >= 1.0) return 1.0;
    return (15.0 / 8.0) * (u - 2.0 * u * u * u / 3.0 + u * u * u * u * u / 5.0);
  }

  Mat<2> operator()(const std::array<double, kMaxDim>& x) const {
    std::array<double, 3> y{};
    double r2 = 0.0;
    for (int i = 0; i < 3; ++i) {
      double d = x[i] - center[i];
      d -= extents[i] * std::round(d / extents[i]);
      y[i] = d;
      r2 += d * d;
    }
    if (reflect) y[0] = -y[0];
    const double r = std::sqrt(r2);
    const cplx I(0.0, 1.0);
    Mat<2> g = Mat<2>::Identity();
    if (r >= radius) return g;
    const double phi = std::numbers::pi * (1.0 - step(r / radius));
    // sin φ / r is bounded at the center since φ → π linearly.
    const double s = r > 0.0 ? std::sin(phi) / r : std::numbers::pi * (15.0 / 8.0) / radius;
    Mat<2> sig;
    sig << y[2], cplx(y[0], -y[1]), cplx(y[0], y[1]), -y[2];
    g = std::cos(phi) * Mat<2>::Identity() + I * s * sig;
    return g;
  }
};

}  // namespace gaugeforms
