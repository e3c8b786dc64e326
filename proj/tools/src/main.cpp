#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "run_config.hpp"
#include "scadci/optimizer.hpp"
#include "scadci/spline_io.hpp"

namespace {

using scadci::cli::RunConfig;

struct Overrides {
  std::optional<int> m, q, multistart;
  std::optional<double> alpha, eta, a, abs_tol, rel_tol, w_tail_mass,
      theta_step, theta_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("--config", config_path, "config file with key = value lines");
  cmd->add_option("--m", ov.m, "residual degrees of freedom m = n - p");
  cmd->add_option("--alpha", ov.alpha, "1 - alpha is the nominal coverage");
  cmd->add_option("--eta", ov.eta, "threshold tuning constant");
  cmd->add_option("--a", ov.a, "SCAD shape constant");
  cmd->add_option("--q", ov.q, "number of spline knots on [0, k]");
  cmd->add_option("--abs_tol", ov.abs_tol, "quadrature absolute tolerance");
  cmd->add_option("--rel_tol", ov.rel_tol, "quadrature relative tolerance");
  cmd->add_option("--w_tail_mass", ov.w_tail_mass,
                  "truncation mass for the W-integrals");
  cmd->add_option("--theta_step", ov.theta_step, "theta grid step");
  cmd->add_option("--theta_max", ov.theta_max,
                  "theta grid end (0 = automatic k + t(m) + 8)");
  cmd->add_option("--multistart", ov.multistart,
                  "number of optimizer starting points");
  cmd->add_option("--seed", ov.seed, "base seed for random starts / MC");
  cmd->add_option("--out_dir", ov.out_dir, "directory for output files");
}

RunConfig build_config(const std::string& config_path, const Overrides& ov) {
  RunConfig cfg;
  if (!config_path.empty()) scadci::cli::load_config_file(config_path, cfg);
  if (ov.m) cfg.m = *ov.m;
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.eta) cfg.eta = *ov.eta;
  if (ov.a) cfg.a = *ov.a;
  if (ov.q) cfg.q = *ov.q;
  if (ov.abs_tol) cfg.abs_tol = *ov.abs_tol;
  if (ov.rel_tol) cfg.rel_tol = *ov.rel_tol;
  if (ov.w_tail_mass) cfg.w_tail_mass = *ov.w_tail_mass;
  if (ov.theta_step) cfg.theta_step = *ov.theta_step;
  if (ov.theta_max) cfg.theta_max = *ov.theta_max;
  if (ov.multistart) cfg.multistart = *ov.multistart;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.out_dir) cfg.out_dir = *ov.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "scadci: confidence intervals centred on the SCAD estimator in\n"
      "orthonormal-design regression. Computes coverage probability and\n"
      "scaled expected length by deterministic quadrature, optimizes the\n"
      "spline half-width under a uniform coverage constraint, and\n"
      "cross-checks against Monte Carlo simulation."};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  std::string spline_file;
  std::vector<double> thetas;
  int table_id = 1;
  int figure_id = 1;
  bool parallel_cells = false;
  long long n_samples = 1000000;
  std::uint64_t mc_seed = 1;

  auto* eval = app.add_subcommand(
      "eval",
      "Evaluate a stored spline. Output columns: theta (the scaled true\n"
      "coefficient beta_i/sigma), coverage (probability the interval covers,\n"
      "deterministic quadrature), sel (expected interval length relative to\n"
      "the usual t-interval).");
  add_common(eval, config_path, ov);
  eval->add_option("--spline", spline_file, "spline JSON file")->required();
  eval->add_option("--theta", thetas, "theta values to evaluate")->required();

  auto* opt = app.add_subcommand(
      "optimize",
      "Minimize sel at theta = 0 over the free spline values subject to\n"
      "coverage >= 1 - alpha everywhere and positivity of the half-width.\n"
      "Writes spline.json and result.json.");
  add_common(opt, config_path, ov);

  auto* table = app.add_subcommand(
      "table",
      "Reproduce a summary table: table 1 uses m = 200, table 2 uses m = 3;\n"
      "cells span eta in {0.5, 1, 2} and q in {4, 5, 6}. CSV columns: the\n"
      "configuration (m, eta, q), e0 (optimized sel at theta = 0), max_sel\n"
      "and its argmax, the verified minimum coverage and its argmin, wall\n"
      "seconds, and a status flag.");
  add_common(table, config_path, ov);
  table->add_option("--table", table_id, "table id: 1 (m=200) or 2 (m=3)")
      ->required();
  table->add_flag("--parallel-cells", parallel_cells,
                  "solve the 9 cells concurrently");

  auto* fig = app.add_subcommand(
      "figure",
      "Emit curve data for a stored spline. Figure 1 columns: theta, sel,\n"
      "coverage. Figure 2 columns: x, s(x), is_knot (1 marks a spline\n"
      "knot).");
  add_common(fig, config_path, ov);
  fig->add_option("--figure", figure_id, "figure id: 1 or 2")->required();
  fig->add_option("--spline", spline_file, "spline JSON file")->required();

  auto* mc = app.add_subcommand(
      "mc-check",
      "Compare quadrature against Monte Carlo simulation. Columns: theta,\n"
      "metric (coverage or sel), quadrature value, mc estimate, mc standard\n"
      "error, z (signed discrepancy in standard errors). Exits 4 if any\n"
      "|z| > 4.");
  add_common(mc, config_path, ov);
  mc->add_option("--spline", spline_file, "spline JSON file")->required();
  mc->add_option("--theta", thetas, "theta values to check")->required();
  mc->add_option("--n", n_samples, "samples per theta (>= 10^4)");
  mc->add_option("--mc-seed", mc_seed, "simulation seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = build_config(config_path, ov);
    if (eval->parsed()) {
      return scadci::cli::cmd_eval(cfg, spline_file, thetas, std::cout);
    }
    if (opt->parsed()) {
      return scadci::cli::cmd_optimize(cfg, std::cout);
    }
    if (table->parsed()) {
      return scadci::cli::cmd_table(cfg, table_id, parallel_cells, std::cout);
    }
    if (fig->parsed()) {
      return scadci::cli::cmd_figure(cfg, spline_file, figure_id, std::cout);
    }
    if (mc->parsed()) {
      return scadci::cli::cmd_mc_check(cfg, spline_file, thetas, n_samples,
                                       mc_seed, std::cout);
    }
  } catch (const scadci::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return scadci::cli::kExitValidation;
  } catch (const scadci::infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return scadci::cli::kExitInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return scadci::cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
