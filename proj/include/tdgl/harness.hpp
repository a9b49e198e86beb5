#pragma once

#include "tdgl/manufactured.hpp"
#include "tdgl/scheme.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tdgl {

enum class TauRule { OneOverM, OneOverMSquared, Fixed };

TauRule parse_tau_rule(const std::string& s);
std::string to_string(TauRule rule);
Coupling parse_coupling(const std::string& s);
std::string to_string(Coupling coupling);

struct ExperimentConfig {
  /// square2d, lshape2d, lshape2d-lagrange or cube3d.
  std::string example = "square2d";
  int r = 0;
  std::vector<int> mesh_sizes{8, 16, 32};
  TauRule tau_rule = TauRule::OneOverM;
  /// Time step for TauRule::Fixed.
  double tau = 0.1;
  std::optional<double> final_time;
  Coupling coupling = Coupling::Sequential;
  std::string output;
};

/// Throws std::invalid_argument on an unknown example, unsorted mesh sizes or a bad tau.
void validate(const ExperimentConfig& config);

/// Applies key=value lines (example, r, mesh_sizes, tau_rule, tau, final_time, coupling, out); '#' starts a comment.
void apply_config_text(ExperimentConfig& config, const std::string& text);

/// Named presets: table1-r0, table1-r1, table2, table3, table4, figure2 at profile quick, paper or extended.
ExperimentConfig preset(const std::string& name, const std::string& profile);
std::vector<int> profile_mesh_sizes(const std::string& name, const std::string& profile);

ManufacturedCase make_case(const std::string& example);
SchemeConfig scheme_config(const ExperimentConfig& config, int M);
double tau_for(const ExperimentConfig& config, int M);

struct ConvergenceRow {
  int M = 0;
  double tau = 0.0;
  ErrorTriple errors;
  double seconds = 0.0;
  int steps = 0;
  double max_solver_residual = 0.0;
  double max_constraint_residual = 0.0;
};

struct ConvergenceReport {
  std::string example;
  std::vector<ConvergenceRow> rows;

  /// log2(e(M_i) / e(M_{i+1})) scaled by log(M_{i+1}/M_i); empty with fewer than two rows.
  std::vector<ErrorTriple> pairwise_orders() const;
  /// Least-squares slope of log e against log(1/M); nullopt with fewer than two rows.
  std::optional<ErrorTriple> fitted_order() const;
};

double pairwise_order(double e_coarse, double e_fine, int M_coarse, int M_fine);
double fitted_slope(const std::vector<int>& M, const std::vector<double>& errors);

/// Optional progress sink receives one line per finished run.
ConvergenceReport run_convergence(const ExperimentConfig& config, std::ostream* progress = nullptr);

/// One report per time step, each over the same mesh sizes.
std::vector<ConvergenceReport> run_stability_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                                   std::ostream* progress = nullptr);

void emit_csv(const ConvergenceReport& report, std::ostream& out);
void emit_csv(const ConvergenceReport& report, const std::string& path);
/// Reads the rows written by emit_csv (the order row is skipped).
ConvergenceReport parse_csv(std::istream& in);

}  // namespace tdgl
