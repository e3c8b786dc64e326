#ifndef SCADCI_TOOLS_COMMANDS_HPP
#define SCADCI_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace scadci::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitMcDisagreement = 4;

/// eval: coverage and scaled expected length of a stored spline on a theta
/// list. Writes <out_dir>/eval.csv and echoes the rows.
int cmd_eval(const RunConfig& cfg, const std::string& spline_file,
             const std::vector<double>& thetas, std::ostream& out);

/// optimize: constrained minimization for the configured (m, alpha, eta, q).
/// Writes <out_dir>/spline.json and <out_dir>/result.json.
int cmd_optimize(const RunConfig& cfg, std::ostream& out);

/// table: reproduces the summary table for m = 200 (table 1) or m = 3
/// (table 2): eta in {0.5, 1, 2} x q in {4, 5, 6}. Writes
/// <out_dir>/table<id>.csv plus per-cell spline JSONs; failed cells are
/// marked and do not abort the run.
int cmd_table(const RunConfig& cfg, int table_id, bool parallel_cells,
              std::ostream& out);

/// figure: curve data. figure 1 = (theta, sel, coverage) on a theta grid;
/// figure 2 = (x, s(x), is_knot) on [0, k]. Writes <out_dir>/figure<id>.csv.
int cmd_figure(const RunConfig& cfg, const std::string& spline_file,
               int figure_id, std::ostream& out);

/// mc-check: quadrature vs Monte Carlo comparison per theta; nonzero exit if
/// any |z| > 4. Writes <out_dir>/mc_check.csv.
int cmd_mc_check(const RunConfig& cfg, const std::string& spline_file,
                 const std::vector<double>& thetas, long long n_samples,
                 std::uint64_t seed, std::ostream& out);

}  // namespace scadci::cli

#endif
