#ifndef SCADCI_SPLINE_HPP
#define SCADCI_SPLINE_HPP

#include <span>
#include <vector>

#include "scadci/problem.hpp"

namespace scadci {

/// Half-width function s of the candidate interval: a natural cubic spline on
/// [0, k] through q equally-spaced knots, with the right-end value pinned to
/// t(m), extended as the constant t(m) on [k, inf). Immutable once fitted.
struct SplineHalfWidth {
  std::vector<double> knots;   // x_1 = 0 < ... < x_q = k, equal spacing
  std::vector<double> values;  // v_1..v_q, back() == t(m) exactly

  // s(x) = a + b dx + c dx^2 + d dx^3 on [knots[i], knots[i+1]], dx = x - knots[i]
  struct Cubic {
    double a, b, c, d;
  };
  std::vector<Cubic> coef;

  double k() const { return knots.back(); }
  double t_m() const { return values.back(); }
  int q() const { return static_cast<int>(knots.size()); }
};

/// Fits the natural cubic spline through (x_i, v_i), i = 1..q-1, plus the
/// pinned point (k, t(m)). knot_values supplies the q-1 free values.
/// Throws std::invalid_argument on non-finite values or q < 3.
SplineHalfWidth spline_fit(std::span<const double> knot_values,
                           const ProblemConfig& cfg, int q);

/// Evaluates s at x >= 0: the spline on [0, k), exactly t(m) for x >= k.
/// Throws std::domain_error for x < 0 (callers pass |.|).
double s_eval(const SplineHalfWidth& s, double x);

}  // namespace scadci

#endif
