// Command-line front end for the verification harness and field files.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "gaugeforms/field_io.hpp"
#include "gaugeforms/harness.hpp"

namespace {

using namespace gaugeforms;
using namespace gaugeforms::harness;

struct Options {
  std::vector<std::string> names;
  std::vector<int> grids;
  int n = 3;
  std::uint64_t seed = 42;
  double fd_step = 1e-3;
  double tol = 1e-10;
  int max_iter = 20000;
  std::string out;
  std::string format = "json";
};

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--grids", o.grids, "mesh counts, e.g. 8,16,32 (default: per check)")->delimiter(',');
  cmd->add_option("--n", o.n, "group rank n of SU(n)");
  cmd->add_option("--seed", o.seed, "seed for generated fields");
  cmd->add_option("--fd-step", o.fd_step, "central-difference step");
  cmd->add_option("--tol", o.tol, "relative residual tolerance of the elliptic solver");
  cmd->add_option("--max-iter", o.max_iter, "iteration limit of the elliptic solver");
  cmd->add_option("--out", o.out, "write the report here instead of stdout");
}

std::vector<std::string> expand(const std::vector<std::string>& names) {
  std::vector<std::string> r;
  for (const auto& n : names) {
    if (n == "all") {
      for (const auto& c : registry()) r.push_back(c.name);
    } else {
      r.push_back(n);
    }
  }
  return r;
}

std::vector<CheckReport> run_all(const Options& o) {
  std::vector<CheckReport> reports;
  for (const auto& name : expand(o.names)) {
    CheckConfig cfg;
    cfg.name = name;
    cfg.grids = o.grids;
    cfg.n = o.n;
    cfg.seed = o.seed;
    cfg.fd_step = o.fd_step;
    cfg.solver.tol = o.tol;
    cfg.solver.max_iter = o.max_iter;
    reports.push_back(run_check(cfg));
  }
  return reports;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << text;
}

std::string render(const std::vector<CheckReport>& reports, const std::string& format) {
  if (format == "csv") {
    std::string s;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const std::string rows = to_csv(reports[i]);
      s += i == 0 ? rows : rows.substr(rows.find('\n') + 1);
    }
    return s;
  }
  if (reports.size() == 1) return to_json(reports.front()).dump(2) + "\n";
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr.dump(2) + "\n";
}

std::string format_order(const OrderEstimate& e) {
  if (e.saturated) return "saturated";
  if (!e.order) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *e.order);
  return buf;
}

/// Per-grid residuals with pairwise orders between consecutive grids.
std::string order_table(const CheckReport& r) {
  std::string s = r.check + " (" + to_string(r.residual_class) + ")\n";
  char line[160];
  std::snprintf(line, sizeof line, "%8s %12s %14s %10s\n", "grid", "scale", "residual", "order");
  s += line;
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    std::string pair = "-";
    if (i > 0) pair = format_order(estimate_order({r.residuals[i - 1], r.residuals[i]}, {r.scales[i - 1], r.scales[i]}));
    const int grid = i < r.grids.size() ? r.grids[i] : r.grids.back();
    std::snprintf(line, sizeof line, "%8d %12.4e %14.6e %10s\n", grid, r.scales[i], r.residuals[i], pair.c_str());
    s += line;
  }
  s += "fit order: " + format_order(r.order) + "  threshold: " + nlohmann::json(r.threshold).dump() +
       "  pass: " + (r.pass ? "true" : "false");
  if (!r.reason.empty()) s += "  (" + r.reason + ")";
  return s + "\n";
}

bool all_pass(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-theoretic differential forms: verification checks and field files"};
  app.require_subcommand(1);

  Options check_opts;
  CLI::App* check = app.add_subcommand("check", "run named checks and print a report");
  check->add_option("name", check_opts.names, "check names, or 'all'")->required();
  add_run_options(check, check_opts);
  check->add_option("--format", check_opts.format, "report format")->check(CLI::IsMember({"json", "csv"}));

  Options conv_opts;
  CLI::App* converge = app.add_subcommand("converge", "run checks and print residual and order tables");
  converge->add_option("name", conv_opts.names, "check names, or 'all'")->required();
  add_run_options(converge, conv_opts);

  CLI::App* list = app.add_subcommand("list", "list registered checks");

  std::string in_path, out_path;
  CLI::App* convert = app.add_subcommand("convert", "convert a field file between binary and JSON layouts");
  convert->add_option("in", in_path, "input field file (layout detected)")->required();
  convert->add_option("out", out_path, "output field file (.json selects JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& c : registry()) {
        std::cout << c.name << " [" << to_string(c.residual_class) << "]\n  " << c.description << "\n  anchor: " << c.anchor
                  << "\n";
      }
      return 0;
    }
    if (*convert) {
      io::write_file(out_path, io::read_file(in_path), io::format_for(out_path));
      return 0;
    }
    if (*check) {
      const auto reports = run_all(check_opts);
      emit(render(reports, check_opts.format), check_opts.out);
      return all_pass(reports) ? 0 : 1;
    }
    if (*converge) {
      const auto reports = run_all(conv_opts);
      std::string s;
      for (const auto& r : reports) s += order_table(r);
      emit(s, conv_opts.out);
      return all_pass(reports) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
