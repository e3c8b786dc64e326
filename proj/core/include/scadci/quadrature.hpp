#ifndef SCADCI_QUADRATURE_HPP
#define SCADCI_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace scadci {

struct QuadratureSettings {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
  double w_tail_mass = 1e-12;  // truncation mass for semi-infinite w-integrals

  QuadratureSettings scaled(double abs_factor) const {
    QuadratureSettings s = *this;
    s.abs_tol *= abs_factor;
    return s;
  }
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
};

/// Subdivision budget ran out before the error estimate met the tolerance.
/// Carries the partial value so callers can decide whether it is usable.
class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& msg, double partial, double err)
      : std::runtime_error(msg), partial_(partial), err_(err) {}
  double partial_value() const { return partial_; }
  double err_est() const { return err_; }

 private:
  double partial_;
  double err_;
};

namespace quad_detail {

// 15-point Kronrod nodes on [-1,1] with the embedded 7-point Gauss rule
// (QUADPACK dqk15 coefficients). Nodes listed from the boundary inward.
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
  double lo, hi;
  double value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk15(F&& f, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double h = 0.5 * (hi - lo);
  double resk = kWgk[7] * f(c);
  double resg = kWg[3] * f(c);
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    resk += kWgk[j] * fsum;
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  if (!std::isfinite(resk)) {
    throw std::domain_error("integrate: integrand returned a non-finite value");
  }
  Panel p;
  p.lo = lo;
  p.hi = hi;
  p.value = resk * h;
  p.err = std::fabs((resk - resg) * h);
  return p;
}

}  // namespace quad_detail

/// Adaptive Gauss-Kronrod integration of f over the finite interval [lo, hi].
/// Bisects the panel with the largest error estimate until the summed
/// estimate meets max(abs_tol, rel_tol * |value|). The final value is
/// accumulated in left-to-right panel order so results are deterministic.
template <class F>
QuadResult integrate(F&& f, double lo, double hi, const QuadratureSettings& st) {
  if (!(lo < hi)) {
    if (lo == hi) return {0.0, 0.0};
    throw std::invalid_argument("integrate: requires lo < hi");
  }

  std::priority_queue<quad_detail::Panel> heap;
  heap.push(quad_detail::gk15(f, lo, hi));

  double total_val = heap.top().value;
  double total_err = heap.top().err;
  int splits = 0;

  const auto tolerance = [&](double v) {
    return std::max(st.abs_tol, st.rel_tol * std::fabs(v));
  };

  while (total_err > tolerance(total_val)) {
    if (splits >= st.max_subdivisions) break;
    quad_detail::Panel worst = heap.top();
    const double width = worst.hi - worst.lo;
    if (width <= std::fabs(worst.lo) * 1e-15 + 1e-300) break;  // cannot refine further
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    quad_detail::Panel left = quad_detail::gk15(f, worst.lo, mid);
    quad_detail::Panel right = quad_detail::gk15(f, mid, worst.hi);
    total_val += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-sum in spatial order; the incremental total drifts and is heap-order
  // dependent in the last ulps.
  std::vector<quad_detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const quad_detail::Panel& a, const quad_detail::Panel& b) {
              return a.lo < b.lo;
            });
  double value = 0.0;
  double err = 0.0;
  double comp = 0.0;  // Kahan carry
  for (const auto& p : panels) {
    const double y = p.value - comp;
    const double t = value + y;
    comp = (t - value) - y;
    value = t;
    err += p.err;
  }

  if (err > tolerance(value)) {
    throw quadrature_error(
        "integrate: subdivision budget exhausted before convergence", value, err);
  }
  return {value, err};
}

/// Integrates across known kinks: the range is cut at each breakpoint and each
/// piece is integrated adaptively with a proportional share of abs_tol.
/// Breakpoints outside (lo, hi) are ignored; an empty set reduces to integrate.
template <class F>
QuadResult integrate_split(F&& f, double lo, double hi,
                           std::span<const double> breakpoints,
                           const QuadratureSettings& st) {
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t n = cuts.size() - 1;
  QuadratureSettings piece = st;
  piece.abs_tol = st.abs_tol / static_cast<double>(n);

  QuadResult total;
  for (std::size_t i = 0; i < n; ++i) {
    const QuadResult r = integrate(f, cuts[i], cuts[i + 1], piece);
    total.value += r.value;
    total.err_est += r.err_est;
  }
  return total;
}

}  // namespace scadci

#endif
