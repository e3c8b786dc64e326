#include "scadci/spline.hpp"

#include <cmath>
#include <stdexcept>

namespace scadci {

SplineHalfWidth spline_fit(std::span<const double> knot_values,
                           const ProblemConfig& cfg, int q) {
  if (q < 3) throw std::invalid_argument("spline_fit: q must be >= 3");
  if (static_cast<int>(knot_values.size()) != q - 1) {
    throw std::invalid_argument("spline_fit: expected q-1 free knot values");
  }
  for (double v : knot_values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("spline_fit: non-finite knot value");
    }
  }

  SplineHalfWidth s;
  s.knots.resize(q);
  s.values.resize(q);
  const double h = cfg.k / (q - 1);
  for (int i = 0; i < q; ++i) s.knots[i] = i * h;
  s.knots[q - 1] = cfg.k;  // exact right endpoint
  for (int i = 0; i < q - 1; ++i) s.values[i] = knot_values[i];
  s.values[q - 1] = cfg.t_m;

  // Natural spline: solve the tridiagonal system for interior second
  // derivatives M_i; M_0 = M_{q-1} = 0. Equal spacing h throughout.
  const int n = q - 1;  // number of intervals
  std::vector<double> M(q, 0.0);
  if (q > 2) {
    const int ni = q - 2;  // interior knots
    std::vector<double> diag(ni, 2.0 * h / 3.0);
    std::vector<double> rhs(ni);
    for (int i = 1; i <= ni; ++i) {
      rhs[i - 1] = (s.values[i + 1] - 2.0 * s.values[i] + s.values[i - 1]) / h;
    }
    // Thomas algorithm, off-diagonals all h/6.
    const double off = h / 6.0;
    for (int i = 1; i < ni; ++i) {
      const double w = off / diag[i - 1];
      diag[i] -= w * off;
      rhs[i] -= w * rhs[i - 1];
    }
    M[ni] = rhs[ni - 1] / diag[ni - 1];
    for (int i = ni - 1; i >= 1; --i) {
      M[i] = (rhs[i - 1] - off * M[i + 1]) / diag[i - 1];
    }
  }

  s.coef.resize(n);
  for (int i = 0; i < n; ++i) {
    const double yi = s.values[i];
    const double yi1 = s.values[i + 1];
    s.coef[i].a = yi;
    s.coef[i].b = (yi1 - yi) / h - h * (2.0 * M[i] + M[i + 1]) / 6.0;
    s.coef[i].c = 0.5 * M[i];
    s.coef[i].d = (M[i + 1] - M[i]) / (6.0 * h);
  }
  return s;
}

double s_eval(const SplineHalfWidth& s, double x) {
  if (x < 0.0) throw std::domain_error("s_eval: x must be nonnegative");
  if (x >= s.k()) return s.t_m();
  const int n = static_cast<int>(s.coef.size());
  const double h = s.knots[1] - s.knots[0];
  int i = static_cast<int>(x / h);
  if (i >= n) i = n - 1;
  if (x < s.knots[i]) --i;  // guard the floor against rounding at cell edges
  const double dx = x - s.knots[i];
  const SplineHalfWidth::Cubic& c = s.coef[i];
  return c.a + dx * (c.b + dx * (c.c + dx * c.d));
}

}  // namespace scadci
