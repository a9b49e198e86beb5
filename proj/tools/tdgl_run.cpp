// Convergence and stability experiments for the TDGL solvers.

#include "tdgl/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kAssertionFailure = 2;
constexpr int kSolverFailure = 1;

std::string read_file(const std::string& path)
{
  std::ifstream f(path);
  if (!f) {
    throw std::runtime_error("cannot read config file '" + path + "'");
  }
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string with_suffix(const std::string& path, const std::string& suffix)
{
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
    return path + suffix;
  }
  return path.substr(0, dot) + suffix + path.substr(dot);
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Backward Euler mixed finite element runs for time-dependent Ginzburg-Landau"};

  std::string preset_name;
  std::string profile = "paper";
  std::string config_path;
  std::string example;
  int order = -1;
  std::vector<int> mesh_sizes;
  std::string tau_rule;
  std::vector<double> taus;
  double final_time = 0.0;
  std::string coupling;
  std::string out;
  std::vector<double> expect;
  double tolerance = 0.2;

  app.add_option("--preset", preset_name, "table1-r0, table1-r1, table2, table3, table4 or figure2");
  app.add_option("--profile", profile, "Mesh list of a preset")->check(CLI::IsMember({"quick", "paper", "extended"}));
  app.add_option("--config", config_path, "key=value file; flags override it")->check(CLI::ExistingFile);
  app.add_option("--example", example, "square2d, lshape2d, lshape2d-lagrange or cube3d");
  app.add_option("--order", order, "Element order r")->check(CLI::Range(0, 1));
  app.add_option("--mesh-sizes", mesh_sizes, "Mesh densities M")->delimiter(',');
  app.add_option("--tau-rule", tau_rule, "one_over_M, one_over_M_squared or fixed");
  app.add_option("--tau", taus, "Time step(s) for the fixed rule; several give a stability sweep")->delimiter(',');
  app.add_option("--final-time", final_time, "Final time")->check(CLI::PositiveNumber);
  app.add_option("--coupling", coupling, "psi in the field equation: sequential (new) or lagged (previous)")
      ->check(CLI::IsMember({"sequential", "lagged"}));
  app.add_option("--out", out, "CSV output path (stdout when empty)");
  app.add_option("--expect-order", expect, "Expected (psi, A, sigma) orders")->expected(3)->delimiter(',');
  app.add_option("--tolerance", tolerance, "Allowed deviation of the fitted orders");

  CLI11_PARSE(app, argc, argv);

  tdgl::ExperimentConfig config;
  std::vector<double> sweep;
  try {
    if (!preset_name.empty()) {
      config = tdgl::preset(preset_name, profile);
      if (preset_name == "figure2") {
        sweep = {0.1, 0.01, 0.001};
      }
    }
    if (!config_path.empty()) {
      tdgl::apply_config_text(config, read_file(config_path));
    }
    if (!example.empty()) {
      config.example = example;
    }
    if (order >= 0) {
      config.r = order;
    }
    if (!mesh_sizes.empty()) {
      config.mesh_sizes = mesh_sizes;
    }
    if (!tau_rule.empty()) {
      config.tau_rule = tdgl::parse_tau_rule(tau_rule);
    }
    if (taus.size() == 1) {
      config.tau = taus.front();
      sweep.clear();
    } else if (taus.size() > 1) {
      sweep = taus;
    }
    if (final_time > 0.0) {
      config.final_time = final_time;
    }
    if (!coupling.empty()) {
      config.coupling = tdgl::parse_coupling(coupling);
    }
    if (!out.empty()) {
      config.output = out;
    }
    if (!sweep.empty()) {
      config.tau_rule = tdgl::TauRule::Fixed;
      config.tau = sweep.front();
    }
    tdgl::validate(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(CLI::ExitCodes::ValidationError);
  }

  std::vector<tdgl::ConvergenceReport> reports;
  try {
    if (sweep.empty()) {
      reports.push_back(tdgl::run_convergence(config, &std::cerr));
    } else {
      reports = tdgl::run_stability_sweep(config, sweep, &std::cerr);
    }
  } catch (const tdgl::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverFailure;
  }

  for (std::size_t k = 0; k < reports.size(); ++k) {
    if (config.output.empty()) {
      if (!sweep.empty()) {
        std::cout << "# tau=" << sweep[k] << '\n';
      }
      tdgl::emit_csv(reports[k], std::cout);
    } else {
      std::ostringstream suffix;
      if (!sweep.empty()) {
        suffix << "_tau" << sweep[k];
      }
      const std::string path = sweep.empty() ? config.output : with_suffix(config.output, suffix.str());
      tdgl::emit_csv(reports[k], path);
    }
  }

  if (!expect.empty()) {
    bool ok = true;
    for (const auto& report : reports) {
      const auto o = report.fitted_order();
      if (!o) {
        std::cerr << "order check needs at least two mesh sizes\n";
        return kAssertionFailure;
      }
      const double got[3] = {o->psi, o->A, o->sigma};
      for (int i = 0; i < 3; ++i) {
        if (std::abs(got[i] - expect[i]) > tolerance) {
          ok = false;
        }
      }
      std::cerr << "fitted orders " << o->psi << ' ' << o->A << ' ' << o->sigma << (ok ? "" : " (outside tolerance)")
                << '\n';
    }
    if (!ok) {
      return kAssertionFailure;
    }
  }
  return 0;
}
