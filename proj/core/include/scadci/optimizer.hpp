#ifndef SCADCI_OPTIMIZER_HPP
#define SCADCI_OPTIMIZER_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scadci/metrics.hpp"
#include "scadci/problem.hpp"
#include "scadci/quadrature.hpp"
#include "scadci/spline.hpp"

namespace scadci {

/// Constrained minimization setup: minimize e(0; s) over the q-1 free spline
/// values subject to coverage >= 1-alpha on the theta grid and s >= floor on
/// a dense positivity grid.
struct OptimizationProblem {
  ProblemConfig cfg;
  int q = 6;
  ThetaGrid constraint_grid;            // coverage constraints
  std::vector<double> positivity_grid;  // s(x) >= positivity_floor here
  QuadratureSettings quad;
  double solver_tol = 1e-6;
  int max_iters = 400;  // inner-iteration budget per start
  int multistart = 4;
  std::uint64_t seed = 1;
  int max_cut_rounds = 5;  // verification-driven grid refinement rounds
  double positivity_floor = 1e-3;

  static OptimizationProblem make(const ProblemConfig& cfg, int q);
};

struct OptimizationResult {
  SplineHalfWidth s_star;
  double objective = 0.0;  // e(0; s*), recomputed from s_star
  double max_sel_value = 0.0;
  double argmax_theta = 0.0;
  double min_coverage = 0.0;  // from the post-hoc verification scan
  double argmin_theta = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> trace;
};

/// No multistart produced a feasible point within budget. Carries the most
/// feasible iterate seen and its worst constraint violation.
class infeasible_error : public std::runtime_error {
 public:
  infeasible_error(const std::string& msg, std::vector<double> iterate,
                   double max_violation)
      : std::runtime_error(msg),
        iterate_(std::move(iterate)),
        max_violation_(max_violation) {}
  const std::vector<double>& most_feasible_iterate() const { return iterate_; }
  double max_violation() const { return max_violation_; }

 private:
  std::vector<double> iterate_;
  double max_violation_;
};

/// Augmented-Lagrangian solve with BFGS inner iterations and finite-difference
/// gradients, multistart, and a cutting-plane loop that re-solves whenever the
/// post-hoc full scan finds a coverage violation. Deterministic for fixed
/// problem and seed.
OptimizationResult optimize(const OptimizationProblem& problem);

/// Minimum coverage over the scan grid with golden-section refinement around
/// the grid minimum (to 1e-6 in theta). Returns (min_coverage, argmin_theta).
std::pair<double, double> verify_coverage(const SplineHalfWidth& s,
                                          const ProblemConfig& cfg,
                                          const QuadratureSettings& settings,
                                          const ThetaGrid& scan);

std::string result_to_json(const OptimizationResult& res,
                           const ProblemConfig& cfg);

}  // namespace scadci

#endif
