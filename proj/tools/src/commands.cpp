#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "scadci/mc.hpp"
#include "scadci/metrics.hpp"
#include "scadci/optimizer.hpp"
#include "scadci/parallel.hpp"
#include "scadci/spline_io.hpp"

namespace scadci::cli {

namespace {

std::string sig6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = std::filesystem::path(cfg.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  return f;
}

void write_text(const RunConfig& cfg, const std::string& name,
                const std::string& text) {
  std::ofstream f = open_out(cfg, name);
  f << text;
}

struct TableCell {
  double eta = 0.0;
  int q = 0;
  bool ok = false;
  bool infeasible = false;
  std::string error;
  OptimizationResult res;
  double seconds = 0.0;
};

TableCell run_cell(const RunConfig& base, int m, double eta, int q) {
  TableCell cell;
  cell.eta = eta;
  cell.q = q;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ProblemConfig pc = ProblemConfig::make(m, base.alpha, eta, base.a);
    OptimizationProblem prob = OptimizationProblem::make(pc, q);
    prob.quad = base.quad();
    prob.multistart = base.multistart;
    prob.seed = base.seed;
    cell.res = optimize(prob);
    cell.ok = true;
  } catch (const infeasible_error& e) {
    cell.infeasible = true;
    cell.error = e.what();
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  const auto t1 = std::chrono::steady_clock::now();
  cell.seconds = std::chrono::duration<double>(t1 - t0).count();
  return cell;
}

}  // namespace

int cmd_eval(const RunConfig& cfg, const std::string& spline_file,
             const std::vector<double>& thetas, std::ostream& out) {
  const ProblemConfig pc = cfg.problem();
  const SplineHalfWidth s = load_spline(spline_file, pc);
  const QuadratureSettings qs = cfg.quad();

  std::vector<double> cov(thetas.size()), len(thetas.size());
  parallel_for(thetas.size(), [&](std::size_t i) {
    cov[i] = coverage(thetas[i], s, pc, qs);
    len[i] = sel(thetas[i], s, pc, qs);
  });

  std::ostringstream csv;
  csv << "# schema: scadci/eval/v1\n";
  csv << "theta,coverage,sel\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    csv << sig6(thetas[i]) << ',' << sig6(cov[i]) << ',' << sig6(len[i]) << '\n';
  }
  write_text(cfg, "eval.csv", csv.str());
  out << csv.str();
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const ProblemConfig pc = cfg.problem();
  OptimizationProblem prob = OptimizationProblem::make(pc, cfg.q);
  prob.quad = cfg.quad();
  prob.multistart = cfg.multistart;
  prob.seed = cfg.seed;

  const OptimizationResult res = optimize(prob);

  write_text(cfg, "spline.json", spline_to_json(res.s_star, pc) + "\n");
  write_text(cfg, "result.json", result_to_json(res, pc) + "\n");

  out << "e(0;s*)      = " << std::setprecision(10) << res.objective << "\n";
  out << "max_theta e  = " << res.max_sel_value << " at theta = "
      << res.argmax_theta << "\n";
  out << "min coverage = " << res.min_coverage << " at theta = "
      << res.argmin_theta << "\n";
  out << "iterations   = " << res.iterations
      << (res.converged ? " (converged)" : " (not converged)") << "\n";
  return kExitOk;
}

int cmd_table(const RunConfig& cfg, int table_id, bool parallel_cells,
              std::ostream& out) {
  if (table_id != 1 && table_id != 2) {
    throw validation_error("table: table_id must be 1 or 2");
  }
  const int m = table_id == 1 ? 200 : 3;
  const double etas[3] = {0.5, 1.0, 2.0};
  const int qs[3] = {4, 5, 6};

  std::vector<TableCell> cells(9);
  const auto run_one = [&](std::size_t idx) {
    cells[idx] = run_cell(cfg, m, etas[idx / 3], qs[idx % 3]);
  };
  if (parallel_cells) {
    parallel_for(9, run_one);
  } else {
    for (std::size_t i = 0; i < 9; ++i) run_one(i);
  }

  std::ostringstream csv;
  csv << "# schema: scadci/table/v1\n";
  csv << "m,eta,q,e0,max_sel,argmax_theta,min_coverage,argmin_theta,seconds,"
         "status\n";
  for (const auto& c : cells) {
    csv << m << ',' << sig6(c.eta) << ',' << c.q << ',';
    if (c.ok) {
      csv << sig6(c.res.objective) << ',' << sig6(c.res.max_sel_value) << ','
          << sig6(c.res.argmax_theta) << ',' << sig6(c.res.min_coverage) << ','
          << sig6(c.res.argmin_theta) << ',' << sig6(c.seconds) << ",ok\n";
    } else {
      csv << ",,,,," << sig6(c.seconds) << ','
          << (c.infeasible ? "infeasible" : "failed") << '\n';
    }
  }
  write_text(cfg, "table" + std::to_string(table_id) + ".csv", csv.str());

  // Per-cell spline files so figures can be regenerated without re-solving.
  for (const auto& c : cells) {
    if (!c.ok) continue;
    std::ostringstream name;
    name << "spline_m" << m << "_eta" << c.eta << "_q" << c.q << ".json";
    const ProblemConfig pc = ProblemConfig::make(m, cfg.alpha, c.eta, cfg.a);
    write_text(cfg, name.str(), spline_to_json(c.res.s_star, pc) + "\n");
  }

  out << "m = " << m << ", 1 - alpha = " << (1.0 - cfg.alpha) << "\n";
  for (int e = 0; e < 3; ++e) {
    out << "\neta = " << etas[e] << "\n";
    out << "  knots            ";
    for (int j = 0; j < 3; ++j) out << std::setw(12) << qs[j];
    out << "\n  e(0;s*)          ";
    for (int j = 0; j < 3; ++j) {
      const auto& c = cells[e * 3 + j];
      if (c.ok) {
        out << std::setw(12) << std::fixed << std::setprecision(4)
            << c.res.objective;
      } else {
        out << std::setw(12) << (c.infeasible ? "infeas" : "failed");
      }
      out.unsetf(std::ios::fixed);
    }
    out << "\n  max_theta e      ";
    for (int j = 0; j < 3; ++j) {
      const auto& c = cells[e * 3 + j];
      if (c.ok) {
        out << std::setw(12) << std::fixed << std::setprecision(4)
            << c.res.max_sel_value;
      } else {
        out << std::setw(12) << "-";
      }
      out.unsetf(std::ios::fixed);
    }
    out << "\n  seconds          ";
    for (int j = 0; j < 3; ++j) {
      out << std::setw(12) << std::setprecision(1) << std::fixed
          << cells[e * 3 + j].seconds;
      out.unsetf(std::ios::fixed);
    }
    out << "\n";
  }
  out << std::setprecision(6);

  bool any_infeasible = false;
  bool any_failed = false;
  for (const auto& c : cells) {
    if (c.infeasible) any_infeasible = true;
    if (!c.ok && !c.infeasible) any_failed = true;
    if (!c.ok) out << "cell eta=" << c.eta << " q=" << c.q << ": " << c.error
                   << "\n";
  }
  if (any_infeasible) return kExitInfeasible;
  if (any_failed) return 1;
  return kExitOk;
}

int cmd_figure(const RunConfig& cfg, const std::string& spline_file,
               int figure_id, std::ostream& out) {
  if (figure_id != 1 && figure_id != 2) {
    throw validation_error("figure: figure_id must be 1 or 2");
  }
  const ProblemConfig pc = cfg.problem();
  const SplineHalfWidth s = load_spline(spline_file, pc);
  const QuadratureSettings qs = cfg.quad();

  std::ostringstream csv;
  if (figure_id == 1) {
    const ThetaGrid grid =
        ThetaGrid::uniform(cfg.theta_step, cfg.effective_theta_max());
    std::vector<double> cov(grid.points.size()), len(grid.points.size());
    parallel_for(grid.points.size(), [&](std::size_t i) {
      cov[i] = coverage(grid.points[i], s, pc, qs);
      len[i] = sel(grid.points[i], s, pc, qs);
    });
    csv << "# schema: scadci/figure1/v1\n";
    csv << "theta,sel,coverage\n";
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      csv << sig6(grid.points[i]) << ',' << sig6(len[i]) << ',' << sig6(cov[i])
          << '\n';
    }
  } else {
    // Uniform x-grid merged with the knots; knots flagged for plotting.
    std::vector<std::pair<double, int>> xs;
    const int n_grid = 400;
    for (int i = 0; i <= n_grid; ++i) {
      xs.emplace_back(pc.k * i / n_grid, 0);
    }
    for (double kx : s.knots) xs.emplace_back(kx, 1);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](const auto& a, const auto& b) {
                           return a.first == b.first && a.second == b.second;
                         }),
             xs.end());
    csv << "# schema: scadci/figure2/v1\n";
    csv << "x,s,is_knot\n";
    for (const auto& [x, is_knot] : xs) {
      csv << sig6(x) << ',' << sig6(s_eval(s, x)) << ',' << is_knot << '\n';
    }
  }
  write_text(cfg, "figure" + std::to_string(figure_id) + ".csv", csv.str());
  out << csv.str();
  return kExitOk;
}

int cmd_mc_check(const RunConfig& cfg, const std::string& spline_file,
                 const std::vector<double>& thetas, long long n_samples,
                 std::uint64_t seed, std::ostream& out) {
  if (n_samples < 10000) {
    throw validation_error("mc-check: n_samples must be >= 10^4");
  }
  const ProblemConfig pc = cfg.problem();
  const SplineHalfWidth s = load_spline(spline_file, pc);
  const QuadratureSettings qs = cfg.quad();

  std::ostringstream csv;
  csv << "# schema: scadci/mc-check/v1\n";
  csv << "theta,metric,quadrature,mc,se,z\n";
  double worst_z = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double th = thetas[i];
    const McEstimate mc = simulate(th, s, pc, n_samples, seed + i);
    const double cov_q = coverage(th, s, pc, qs);
    const double sel_q = sel(th, s, pc, qs);
    const double zc = (cov_q - mc.coverage_est) /
                      (mc.coverage_se > 0.0 ? mc.coverage_se : 1e-300);
    const double zs =
        (sel_q - mc.sel_est) / (mc.sel_se > 0.0 ? mc.sel_se : 1e-300);
    worst_z = std::max({worst_z, std::fabs(zc), std::fabs(zs)});
    csv << sig6(th) << ",coverage," << sig6(cov_q) << ',' << sig6(mc.coverage_est)
        << ',' << sig6(mc.coverage_se) << ',' << sig6(zc) << '\n';
    csv << sig6(th) << ",sel," << sig6(sel_q) << ',' << sig6(mc.sel_est) << ','
        << sig6(mc.sel_se) << ',' << sig6(zs) << '\n';
  }
  write_text(cfg, "mc_check.csv", csv.str());
  out << csv.str();
  out << "max |z| = " << sig6(worst_z) << "\n";
  return worst_z > 4.0 ? kExitMcDisagreement : kExitOk;
}

}  // namespace scadci::cli
