#include "tdgl/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace tdgl {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& s)
{
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(std::stoi(item));
    }
  }
  return out;
}

std::string format_e(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

TauRule parse_tau_rule(const std::string& s)
{
  if (s == "one_over_M") {
    return TauRule::OneOverM;
  }
  if (s == "one_over_M_squared") {
    return TauRule::OneOverMSquared;
  }
  if (s == "fixed") {
    return TauRule::Fixed;
  }
  throw std::invalid_argument("unknown tau rule '" + s + "'");
}

std::string to_string(TauRule rule)
{
  switch (rule) {
    case TauRule::OneOverM:
      return "one_over_M";
    case TauRule::OneOverMSquared:
      return "one_over_M_squared";
    case TauRule::Fixed:
      return "fixed";
  }
  return {};
}

Coupling parse_coupling(const std::string& s)
{
  if (s == "lagged") {
    return Coupling::Lagged;
  }
  if (s == "sequential") {
    return Coupling::Sequential;
  }
  throw std::invalid_argument("unknown coupling '" + s + "'");
}

std::string to_string(Coupling coupling) { return coupling == Coupling::Lagged ? "lagged" : "sequential"; }

ManufacturedCase make_case(const std::string& example)
{
  if (example == "square2d") {
    return square2d_case();
  }
  if (example == "lshape2d" || example == "lshape2d-lagrange") {
    return lshape2d_case();
  }
  if (example == "cube3d") {
    return cube3d_case();
  }
  throw std::invalid_argument("unknown example '" + example + "'");
}

void validate(const ExperimentConfig& config)
{
  (void)make_case(config.example);
  if (config.mesh_sizes.empty()) {
    throw std::invalid_argument("mesh size list is empty");
  }
  for (std::size_t i = 0; i < config.mesh_sizes.size(); ++i) {
    if (config.mesh_sizes[i] < 1 || (i > 0 && config.mesh_sizes[i] <= config.mesh_sizes[i - 1])) {
      throw std::invalid_argument("mesh sizes must be positive and strictly increasing");
    }
  }
  if (config.tau_rule == TauRule::Fixed && !(config.tau > 0.0)) {
    throw std::invalid_argument("fixed tau must be positive");
  }
  if (config.final_time && !(*config.final_time > 0.0)) {
    throw std::invalid_argument("final time must be positive");
  }
}

void apply_config_text(ExperimentConfig& config, const std::string& text)
{
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "example") {
      config.example = value;
    } else if (key == "r" || key == "order") {
      config.r = std::stoi(value);
    } else if (key == "mesh_sizes" || key == "M_list") {
      config.mesh_sizes = parse_int_list(value);
    } else if (key == "tau_rule") {
      config.tau_rule = parse_tau_rule(value);
    } else if (key == "tau") {
      config.tau = std::stod(value);
    } else if (key == "final_time" || key == "T") {
      config.final_time = std::stod(value);
    } else if (key == "coupling") {
      config.coupling = parse_coupling(value);
    } else if (key == "out" || key == "output") {
      config.output = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

std::vector<int> profile_mesh_sizes(const std::string& name, const std::string& profile)
{
  if (profile != "quick" && profile != "paper" && profile != "extended") {
    throw std::invalid_argument("unknown profile '" + profile + "'");
  }
  const bool quick = profile == "quick";
  const bool extended = profile == "extended";
  if (name == "table1-r0") {
    return quick ? std::vector<int>{16, 32, 64} : std::vector<int>{64, 128, 256};
  }
  if (name == "table1-r1") {
    if (quick) {
      return {4, 8, 16};
    }
    return extended ? std::vector<int>{8, 16, 32, 64} : std::vector<int>{8, 16, 32};
  }
  if (name == "table2" || name == "table3") {
    return quick ? std::vector<int>{16, 32, 64} : std::vector<int>{32, 64, 128, 256};
  }
  if (name == "table4") {
    if (quick) {
      return {4, 8};
    }
    return extended ? std::vector<int>{8, 16, 32} : std::vector<int>{8, 16};
  }
  if (name == "figure2") {
    return quick ? std::vector<int>{8, 16, 32} : std::vector<int>{8, 16, 32, 64, 128};
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

ExperimentConfig preset(const std::string& name, const std::string& profile)
{
  ExperimentConfig c;
  c.mesh_sizes = profile_mesh_sizes(name, profile);
  if (name == "table1-r0") {
    c.example = "square2d";
  } else if (name == "table1-r1") {
    c.example = "square2d";
    c.r = 1;
    c.tau_rule = TauRule::OneOverMSquared;
  } else if (name == "table2") {
    c.example = "lshape2d";
  } else if (name == "table3") {
    c.example = "lshape2d-lagrange";
  } else if (name == "table4") {
    c.example = "cube3d";
  } else if (name == "figure2") {
    c.example = "square2d";
    c.r = 1;
    c.tau_rule = TauRule::Fixed;
  }
  return c;
}

double tau_for(const ExperimentConfig& config, int M)
{
  switch (config.tau_rule) {
    case TauRule::OneOverM:
      return 1.0 / M;
    case TauRule::OneOverMSquared:
      return 1.0 / (static_cast<double>(M) * M);
    case TauRule::Fixed:
      return config.tau;
  }
  return config.tau;
}

SchemeConfig scheme_config(const ExperimentConfig& config, int M)
{
  SchemeConfig s;
  s.scheme = config.example == "lshape2d-lagrange" ? SchemeKind::Lagrange : SchemeKind::Mixed;
  s.r = config.r;
  s.M = M;
  s.tau = tau_for(config, M);
  s.final_time = config.final_time;
  s.coupling = config.coupling;
  return s;
}

double pairwise_order(double e_coarse, double e_fine, int M_coarse, int M_fine)
{
  return std::log(e_coarse / e_fine) / std::log(static_cast<double>(M_fine) / M_coarse);
}

double fitted_slope(const std::vector<int>& M, const std::vector<double>& errors)
{
  const std::size_t n = M.size();
  if (n < 2 || errors.size() != n) {
    throw std::invalid_argument("fitted_slope: need at least two matching samples");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(1.0 / M[i]);
    my += std::log(errors[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(1.0 / M[i]) - mx;
    sxy += dx * (std::log(errors[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::vector<ErrorTriple> ConvergenceReport::pairwise_orders() const
{
  std::vector<ErrorTriple> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& a = rows[i - 1];
    const auto& b = rows[i];
    out.push_back({pairwise_order(a.errors.psi, b.errors.psi, a.M, b.M),
                   pairwise_order(a.errors.A, b.errors.A, a.M, b.M),
                   pairwise_order(a.errors.sigma, b.errors.sigma, a.M, b.M)});
  }
  return out;
}

std::optional<ErrorTriple> ConvergenceReport::fitted_order() const
{
  if (rows.size() < 2) {
    return std::nullopt;
  }
  std::vector<int> M;
  std::vector<double> ep, ea, es;
  for (const auto& r : rows) {
    M.push_back(r.M);
    ep.push_back(r.errors.psi);
    ea.push_back(r.errors.A);
    es.push_back(r.errors.sigma);
  }
  return ErrorTriple{fitted_slope(M, ep), fitted_slope(M, ea), fitted_slope(M, es)};
}

ConvergenceReport run_convergence(const ExperimentConfig& config, std::ostream* progress)
{
  validate(config);
  const ManufacturedCase mcase = make_case(config.example);
  ConvergenceReport report;
  report.example = config.example;
  for (int M : config.mesh_sizes) {
    TdglSolver solver(mcase, scheme_config(config, M));
    RunResult res;
    try {
      res = solver.run();
    } catch (const SolverError& e) {
      throw SolverError(config.example + " M=" + std::to_string(M) + " " + e.what(), e.pivot_row());
    }
    ConvergenceRow row;
    row.M = M;
    row.tau = res.tau;
    row.errors = res.errors;
    row.seconds = res.seconds;
    row.steps = res.steps;
    row.max_solver_residual = res.max_solver_residual;
    row.max_constraint_residual = res.max_constraint_residual;
    report.rows.push_back(row);
    if (progress != nullptr) {
      *progress << config.example << " r=" << config.r << " M=" << M << " tau=" << format_e(row.tau)
                << " psi=" << format_e(row.errors.psi) << " A=" << format_e(row.errors.A)
                << " sigma=" << format_e(row.errors.sigma) << " (" << row.seconds << " s, " << res.factorizations << " LU)" << std::endl;
    }
  }
  return report;
}

std::vector<ConvergenceReport> run_stability_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                                   std::ostream* progress)
{
  std::vector<ConvergenceReport> out;
  for (double tau : taus) {
    ExperimentConfig c = base;
    c.tau_rule = TauRule::Fixed;
    c.tau = tau;
    out.push_back(run_convergence(c, progress));
  }
  return out;
}

void emit_csv(const ConvergenceReport& report, std::ostream& out)
{
  out << "M,tau,err_psi,err_A,err_sigma,seconds\n";
  for (const auto& r : report.rows) {
    out << r.M << ',' << format_e(r.tau) << ',' << format_e(r.errors.psi) << ',' << format_e(r.errors.A) << ','
        << format_e(r.errors.sigma) << ',' << format_e(r.seconds) << '\n';
  }
  if (const auto o = report.fitted_order()) {
    out << "order,," << format_e(o->psi) << ',' << format_e(o->A) << ',' << format_e(o->sigma) << ",\n";
  }
}

void emit_csv(const ConvergenceReport& report, const std::string& path)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  emit_csv(report, f);
  if (!f) {
    throw std::runtime_error("write to '" + path + "' failed");
  }
}

ConvergenceReport parse_csv(std::istream& in)
{
  ConvergenceReport report;
  std::string line;
  if (!std::getline(in, line) || trim(line) != "M,tau,err_psi,err_A,err_sigma,seconds") {
    throw std::runtime_error("parse_csv: missing header");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("order", 0) == 0) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 6) {
      throw std::runtime_error("parse_csv: malformed row '" + line + "'");
    }
    ConvergenceRow r;
    r.M = std::stoi(cells[0]);
    r.tau = std::stod(cells[1]);
    r.errors = {std::stod(cells[2]), std::stod(cells[3]), std::stod(cells[4])};
    r.seconds = std::stod(cells[5]);
    report.rows.push_back(r);
  }
  return report;
}

}  // namespace tdgl
