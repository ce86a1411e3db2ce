#pragma once

// Check configuration and machine-readable reports.

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaugeforms/convergence.hpp"
#include "gaugeforms/elliptic.hpp"
#include "gaugeforms/errors.hpp"

namespace gaugeforms::harness {

enum class ResidualClass { exact, convergent };

inline const char* to_string(ResidualClass c) { return c == ResidualClass::exact ? "exact" : "convergent"; }

struct CheckConfig {
  std::string name;
  std::vector<int> grids;  ///< empty selects the check's default grids
  int n = 3;
  std::uint64_t seed = 42;
  double fd_step = 1e-3;
  SolverConfig solver;

  void validate() const {
    if (n < 2) throw Error("n must be at least 2");
    for (std::size_t i = 1; i < grids.size(); ++i)
      if (grids[i] <= grids[i - 1]) throw Error("grid counts must be strictly increasing");
    if (!(fd_step > 0.0)) throw Error("finite-difference step must be positive");
    if (!(solver.tol > 0.0) || solver.max_iter < 1) throw Error("invalid solver configuration");
  }
};

/// Sign conventions measured at run time.
struct Conventions {
  int s_cs = 0;     ///< CS₍₃₎(g·A) − CS₍₃₎(A) = s_cs·deg g
  int s_q = 0;      ///< sector_charge(g⁻¹dg) = s_q·deg g
  int s_sigma = 0;  ///< σ((a,α),(∗α,∗a)) = s_σ(‖α‖² − ‖a‖²)
  bool operator==(const Conventions&) const = default;
};

struct CheckReport {
  std::string check;
  nlohmann::json params = nlohmann::json::object();
  std::vector<int> grids;
  std::vector<double> scales;  ///< mesh spacing, or the scaling parameter of the check
  std::vector<double> residuals;
  ResidualClass residual_class = ResidualClass::exact;
  double threshold = 0.0;  ///< tolerance (exact) or minimum order (convergent)
  std::optional<double> max_order;
  OrderEstimate order;
  Conventions conventions;
  nlohmann::json normalization = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();
  bool pass = false;
  std::string reason;
  double wall_time = 0.0;

  bool operator==(const CheckReport& o) const {
    return check == o.check && params == o.params && grids == o.grids && scales == o.scales &&
           residuals == o.residuals && residual_class == o.residual_class && threshold == o.threshold &&
           max_order == o.max_order && order.order == o.order.order && order.saturated == o.order.saturated &&
           conventions == o.conventions && normalization == o.normalization && details == o.details &&
           pass == o.pass && reason == o.reason && wall_time == o.wall_time;
  }
};

/// Applies the pass rule of the report's residual class.
inline void decide(CheckReport& r) {
  if (!r.reason.empty()) {
    r.pass = false;
    return;
  }
  if (r.residuals.empty()) {
    r.pass = false;
    r.reason = "no residuals";
    return;
  }
  if (r.residual_class == ResidualClass::exact) {
    double worst = 0.0;
    for (double x : r.residuals) worst = std::isfinite(x) ? std::max(worst, x) : INFINITY;
    r.pass = worst <= r.threshold;
    if (!r.pass) r.reason = "residual above tolerance";
    return;
  }
  if (r.residuals.size() < 2) {
    r.pass = false;
    r.reason = "convergence checks need at least two grids";
    return;
  }
  if (r.order.saturated) {
    r.pass = true;
    return;
  }
  const double p = *r.order.order;
  r.pass = p >= r.threshold && (!r.max_order || p <= *r.max_order);
  if (!r.pass) r.reason = "estimated order outside the accepted range";
}

inline nlohmann::json to_json(const CheckReport& r, bool include_wall_time = true) {
  nlohmann::json order;
  if (r.order.saturated)
    order = "saturated";
  else if (r.order.order)
    order = *r.order.order;
  nlohmann::json j = {{"check", r.check},
                      {"params", r.params},
                      {"grids", r.grids},
                      {"scales", r.scales},
                      {"residuals", r.residuals},
                      {"class", to_string(r.residual_class)},
                      {"threshold", r.threshold},
                      {"order", order},
                      {"conventions", {{"s_cs", r.conventions.s_cs}, {"s_q", r.conventions.s_q}, {"s_sigma", r.conventions.s_sigma}}},
                      {"normalization", r.normalization},
                      {"details", r.details},
                      {"pass", r.pass},
                      {"reason", r.reason}};
  if (r.max_order) j["max_order"] = *r.max_order;
  if (include_wall_time) j["wall_time"] = r.wall_time;
  return j;
}

inline CheckReport report_from_json(const nlohmann::json& j) {
  CheckReport r;
  try {
    r.check = j.at("check").get<std::string>();
    r.params = j.at("params");
    r.grids = j.at("grids").get<std::vector<int>>();
    r.scales = j.at("scales").get<std::vector<double>>();
    r.residuals = j.at("residuals").get<std::vector<double>>();
    const std::string cls = j.at("class").get<std::string>();
    if (cls != "exact" && cls != "convergent") throw Error("unknown residual class '" + cls + "'");
    r.residual_class = cls == "exact" ? ResidualClass::exact : ResidualClass::convergent;
    r.threshold = j.at("threshold").get<double>();
    if (j.contains("max_order")) r.max_order = j.at("max_order").get<double>();
    const auto& o = j.at("order");
    if (o.is_string())
      r.order.saturated = true;
    else if (o.is_number())
      r.order.order = o.get<double>();
    const auto& c = j.at("conventions");
    r.conventions = {c.at("s_cs").get<int>(), c.at("s_q").get<int>(), c.at("s_sigma").get<int>()};
    r.normalization = j.at("normalization");
    r.details = j.at("details");
    r.pass = j.at("pass").get<bool>();
    r.reason = j.at("reason").get<std::string>();
    r.wall_time = j.value("wall_time", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
  return r;
}

/// One row per grid: check,class,grid,scale,residual,order,pass.
inline std::string to_csv(const CheckReport& r) {
  const auto num = [](double x) { return nlohmann::json(x).dump(); };
  std::ostringstream out;
  out << "check,class,grid,scale,residual,order,pass\n";
  std::string order = r.order.saturated ? "saturated" : r.order.order ? num(*r.order.order) : "";
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    out << r.check << ',' << to_string(r.residual_class) << ',' << (i < r.grids.size() ? r.grids[i] : r.grids.back())
        << ',' << num(r.scales[i]) << ',' << num(r.residuals[i]) << ',' << order << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace gaugeforms::harness
