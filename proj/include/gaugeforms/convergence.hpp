#pragma once

// Order estimation for refinement studies.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gaugeforms {

/// Residuals at or below this level are treated as roundoff.
inline constexpr double kSaturationFloor = 1e-13;

struct OrderEstimate {
  /// Least-squares slope of log(residual) against log(h); empty when saturated.
  std::optional<double> order;
  bool saturated = false;
};

/// Fits log(residual) = p·log(h) + c. `spacings` are the mesh widths.
/// Returns a saturated estimate when every residual is at the floor.
inline OrderEstimate estimate_order(const std::vector<double>& residuals, const std::vector<double>& spacings) {
  if (residuals.size() != spacings.size() || residuals.size() < 2)
    throw std::invalid_argument("estimate_order needs at least two (residual, h) pairs");
  bool all_floor = true;
  for (double r : residuals) {
    if (!(r >= 0.0)) throw std::invalid_argument("residuals must be non-negative");
    if (r > kSaturationFloor) all_floor = false;
  }
  if (all_floor) return {std::nullopt, true};
  std::vector<double> x, y;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    x.push_back(std::log(spacings[i]));
    y.push_back(std::log(std::max(residuals[i], kSaturationFloor)));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return {sxy / sxx, false};
}

/// Same fit with spacings 1/count.
inline OrderEstimate estimate_order_counts(const std::vector<double>& residuals, const std::vector<int>& counts) {
  std::vector<double> h;
  for (int c : counts) h.push_back(1.0 / c);
  return estimate_order(residuals, h);
}

}  // namespace gaugeforms
