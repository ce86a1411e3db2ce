#pragma once

// Matrix algebra for su(n) and SU(n) values.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace gaugeforms {

using cplx = std::complex<double>;

/// n×n complex matrix. Field values are stored as general matrices because
/// products such as A∧A or a∧b leave su(n); the su(n) invariants are checked
/// where they hold (connections, tangent directions, curvature).
template <int N>
using Mat = Eigen::Matrix<cplx, N, N>;

template <int N>
Mat<N> identity() {
  return Mat<N>::Identity();
}

template <int N>
Mat<N> commutator(const Mat<N>& x, const Mat<N>& y) {
  return x * y - y * x;
}

/// tr(XY), summed so that trace_pair(X,Y) == trace_pair(Y,X) bit for bit.
template <int N>
cplx trace_pair(const Mat<N>& x, const Mat<N>& y) {
  cplx s = 0.0;
  for (int i = 0; i < N; ++i) {
    s += x(i, i) * y(i, i);
    for (int j = i + 1; j < N; ++j) s += x(i, j) * y(j, i) + x(j, i) * y(i, j);
  }
  return s;
}

/// (M − M†)/2 with its trace part removed.
template <int N>
Mat<N> project_alg(const Mat<N>& m) {
  Mat<N> x = 0.5 * (m - m.adjoint());
  const cplx t = x.trace() / static_cast<double>(N);
  x.diagonal().array() -= t;
  return x;
}

/// Largest entrywise distance of m from su(n).
template <int N>
double alg_defect(const Mat<N>& m) {
  return (m - project_alg<N>(m)).cwiseAbs().maxCoeff();
}

/// max(‖g†g − I‖, |det g − 1|).
template <int N>
double group_defect(const Mat<N>& g) {
  const double u = (g.adjoint() * g - identity<N>()).cwiseAbs().maxCoeff();
  return std::max(u, std::abs(g.determinant() - 1.0));
}

/// Nearest special unitary matrix (polar factor, then det phase removed).
template <int N>
Mat<N> project_group(const Mat<N>& m) {
  Eigen::JacobiSVD<Mat<N>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat<N> u = svd.matrixU() * svd.matrixV().adjoint();
  const cplx d = u.determinant();
  u *= std::polar(1.0, -std::arg(d) / static_cast<double>(N));
  return u;
}

/// exp(X) for X in su(n), through the eigendecomposition of the Hermitian
/// matrix −iX. The input is projected to su(n) first.
template <int N>
Mat<N> su_exponential(const Mat<N>& x) {
  const Mat<N> h = cplx(0.0, -1.0) * project_alg<N>(x);
  Eigen::SelfAdjointEigenSolver<Mat<N>> es(h);
  const auto& v = es.eigenvectors();
  Eigen::Matrix<cplx, N, 1> phase;
  for (int k = 0; k < N; ++k) phase(k) = std::polar(1.0, es.eigenvalues()(k));
  Mat<N> g = v * phase.asDiagonal() * v.adjoint();
  if (group_defect<N>(g) > 1e-12) g = project_group<N>(g);
  return g;
}

/// Orthonormal basis of su(n) for the pairing −tr(XY): i/√2 times the
/// generalized Gell-Mann matrices.
template <int N>
const std::array<Mat<N>, N * N - 1>& su_basis() {
  static const std::array<Mat<N>, N * N - 1> basis = [] {
    std::array<Mat<N>, N * N - 1> b;
    const cplx i(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    int k = 0;
    for (int r = 0; r < N; ++r) {
      for (int c = r + 1; c < N; ++c) {
        Mat<N> sym = Mat<N>::Zero();
        sym(r, c) = sym(c, r) = 1.0;
        b[k++] = i * s * sym;
        Mat<N> asym = Mat<N>::Zero();
        asym(r, c) = cplx(0.0, -1.0);
        asym(c, r) = cplx(0.0, 1.0);
        b[k++] = i * s * asym;
      }
    }
    for (int l = 1; l < N; ++l) {
      Mat<N> d = Mat<N>::Zero();
      const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) d(j, j) = norm;
      d(l, l) = -l * norm;
      b[k++] = i * s * d;
    }
    return b;
  }();
  return basis;
}

/// Coordinates of an su(n) element in su_basis().
template <int N>
Eigen::Matrix<double, N * N - 1, 1> alg_coords(const Mat<N>& x) {
  Eigen::Matrix<double, N * N - 1, 1> c;
  const auto& b = su_basis<N>();
  for (int k = 0; k < N * N - 1; ++k) c(k) = -trace_pair<N>(b[k], x).real();
  return c;
}

/// Seedable generator with a portable output sequence. std::mt19937_64 is
/// fully specified by the standard; the conversion to doubles is done here
/// rather than through <random> distributions, whose algorithms vary.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }
  int below(int n) { return static_cast<int>(uniform() * n); }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

/// su(n) element with basis coordinates uniform in [−scale, scale].
template <int N>
Mat<N> random_alg(Rng& rng, double scale) {
  Mat<N> x = Mat<N>::Zero();
  for (const auto& e : su_basis<N>()) x += rng.uniform(-scale, scale) * e;
  return x;
}

template <int N>
Mat<N> random_alg(std::uint64_t seed, double scale) {
  Rng rng(seed);
  return random_alg<N>(rng, scale);
}

}  // namespace gaugeforms
