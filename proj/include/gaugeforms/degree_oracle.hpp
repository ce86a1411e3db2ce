#pragma once

// Independent degree of a map T³ → SU(2): signed count of preimages of a
// regular value, found by grid seeding and Newton iteration.

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gaugeforms/errors.hpp"
#include "gaugeforms/lie.hpp"
#include "gaugeforms/mesh.hpp"

namespace gaugeforms {

struct Preimage {
  std::array<double, 3> x{};
  int sign = 0;
  double jacobian = 0.0;
};

struct OracleDegree {
  int degree = 0;
  std::vector<Preimage> preimages;
};

/// Chart around p: coordinates v_a of g p⁻¹ = a₀I + i a·σ, valid for a₀ > 0.
inline Eigen::Vector3d su2_chart(const Mat<2>& u) {
  const cplx re = u(0, 1) + u(1, 0), im = u(0, 1) - u(1, 0);
  // u = a₀I + i(a₁σ₁ + a₂σ₂ + a₃σ₃): u01 = i a₁ + a₂, u10 = i a₁ − a₂, u00 = a₀ + i a₃.
  return {0.5 * re.imag(), 0.5 * im.real(), 0.5 * (u(0, 0) - u(1, 1)).imag()};
}

/// Signed preimage count of `p` under g on the periodic box with the given
/// extents. `seeds` grid points per axis start the Newton searches; the sign
/// of each preimage is that of det ∂v/∂x in the chart around p.
template <class F>
OracleDegree preimage_degree(F&& g, const std::array<double, 3>& extents, const Mat<2>& p, int seeds = 24) {
  const Mat<2> pinv = p.adjoint();
  const auto chart = [&](const Eigen::Vector3d& x) {
    const Mat<2> u = g(std::array<double, kMaxDim>{x[0], x[1], x[2], 0.0}) * pinv;
    return std::make_pair(su2_chart(u), (u.trace()).real());
  };
  const auto jacobian = [&](const Eigen::Vector3d& x) {
    Eigen::Matrix3d j;
    const double step = 1e-6;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[k] = step;
      j.col(k) = (chart(x + e).first - chart(x - e).first) / (2 * step);
    }
    return j;
  };
  const auto wrap = [&](Eigen::Vector3d x) {
    for (int k = 0; k < 3; ++k) x[k] -= extents[k] * std::floor(x[k] / extents[k]);
    return x;
  };
  const auto periodic_distance = [&](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
      double d = a[k] - b[k];
      d -= extents[k] * std::round(d / extents[k]);
      s += d * d;
    }
    return std::sqrt(s);
  };

  OracleDegree out;
  std::vector<Eigen::Vector3d> found;
  for (int i = 0; i < seeds; ++i)
    for (int j = 0; j < seeds; ++j)
      for (int k = 0; k < seeds; ++k) {
        Eigen::Vector3d x((i + 0.5) * extents[0] / seeds, (j + 0.5) * extents[1] / seeds,
                          (k + 0.5) * extents[2] / seeds);
        auto [v, tr] = chart(x);
        if (tr <= 0.0 || v.norm() > 0.5) continue;
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
          const Eigen::Matrix3d jac = jacobian(x);
          const Eigen::Vector3d dx = jac.fullPivLu().solve(-v);
          if (!dx.allFinite()) break;
          x = wrap(x + dx);
          std::tie(v, tr) = chart(x);
          if (tr <= 0.0) break;
          if (v.norm() < 1e-13) {
            converged = true;
            break;
          }
        }
        if (!converged) continue;
        bool duplicate = false;
        for (const auto& y : found)
          if (periodic_distance(x, y) < 1e-7) duplicate = true;
        if (duplicate) continue;
        const double det = jacobian(x).determinant();
        if (std::abs(det) < 1e-8) throw Error("degree oracle: value is not regular");
        found.push_back(x);
        out.preimages.push_back({{x[0], x[1], x[2]}, det > 0 ? 1 : -1, det});
        out.degree += det > 0 ? 1 : -1;
      }
  return out;
}

}  // namespace gaugeforms
