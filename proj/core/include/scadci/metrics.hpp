#ifndef SCADCI_METRICS_HPP
#define SCADCI_METRICS_HPP

#include <utility>
#include <vector>

#include "scadci/problem.hpp"
#include "scadci/quadrature.hpp"
#include "scadci/spline.hpp"

namespace scadci {

/// Sorted nonnegative evaluation grid for theta = beta_i/sigma. Always
/// contains 0.
struct ThetaGrid {
  std::vector<double> points;
  double theta_max = 0.0;

  // {0, step, 2*step, ...} covering [0, max].
  static ThetaGrid uniform(double step, double max);

  // Constraint grid used for the optimization: step 0.05 on [0,2], then
  // step 0.1 out to k + t(m) + 4.
  static ThetaGrid constraint_default(const ProblemConfig& cfg);
};

/// Closed-form weight (2*pi)^(-1/2) (m/(x^2+m))^(m/2+1), equal to
/// the inner integral of phi(w x) w^2 f_W(w) over w > 0.
double sel_weight_theta0(double x, int m);

/// Scaled expected length e(theta; s): expected length of the candidate
/// interval divided by that of the usual t-interval. Deterministic nested
/// quadrature; equals 1 identically when s == t(m).
double sel(double theta, const SplineHalfWidth& s, const ProblemConfig& cfg,
           const QuadratureSettings& settings);

/// e(0; s) through the single-integral closed-weight form. This is the
/// optimizer's objective; it agrees with sel(0, s) to quadrature tolerance.
double sel_at_zero(const SplineHalfWidth& s, const ProblemConfig& cfg,
                   const QuadratureSettings& settings);

/// Probability mass of [-t(m)w, t(m)w] ∩ [-kw-theta, kw-theta] under a
/// standard normal; 0 when the intersection is empty.
double b_func(double w, double theta, const ProblemConfig& cfg);

/// Inner w-integral of the coverage double integral at abscissa x, for
/// theta >= 0. Uses the closed form when theta == 0 (or theta < 1e-8) and
/// the truncated-range decomposition otherwise.
double cp_inner(double x, double theta, const SplineHalfWidth& s,
                const ProblemConfig& cfg, const QuadratureSettings& settings);

/// Coverage probability of the candidate interval at theta. Even in theta;
/// negative inputs are mapped to |theta|. Converges to 1 - alpha as
/// theta -> infinity.
double coverage(double theta, const SplineHalfWidth& s, const ProblemConfig& cfg,
                const QuadratureSettings& settings);

/// (max value, argmax theta) of e(theta; s) over theta >= 0: grid scan plus
/// golden-section refinement on the bracketing cell to 1e-6 in theta.
std::pair<double, double> max_sel(const SplineHalfWidth& s,
                                  const ProblemConfig& cfg,
                                  const QuadratureSettings& settings,
                                  const ThetaGrid& grid);

namespace detail {

// Truncation point for the semi-infinite w-integrals: starts from the
// tail-mass bound and inflates until the integrand envelope is negligible.
double effective_w_max(int m, int w_power, const QuadratureSettings& settings);

// Breakpoints of the outer x-integrand on (-k, k): SCAD branch points,
// spline knots, and sign changes of h(x) +/- s(|x|).
std::vector<double> coverage_x_breakpoints(const SplineHalfWidth& s,
                                           const ProblemConfig& cfg);

}  // namespace detail

}  // namespace scadci

#endif
