#ifndef SCADCI_TESTS_SUPPORT_TEST_ORACLES_HPP
#define SCADCI_TESTS_SUPPORT_TEST_ORACLES_HPP

// Test-side oracles, deliberately independent of the library code paths they
// check: composite Simpson instead of adaptive Gauss-Kronrod, a Taylor erf
// instead of std::erfc, Lanczos log-gamma instead of lgamma_r.

#include <cmath>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 2000) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; i += 2) sum += 4.0 * f(a + i * h);
  for (int i = 2; i < n; i += 2) sum += 2.0 * f(a + i * h);
  return sum * h / 3.0;
}

// Taylor series erf, accurate to ~1e-14 for |x| <= 4.
inline double erf_series(double x) {
  const double sign = x < 0 ? -1.0 : 1.0;
  x = std::fabs(x);
  if (x > 6.0) return sign;  // 1 to double precision
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x * x / n;
    const double add = term / (2 * n + 1);
    sum += add;
    if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
  }
  return sign * 2.0 / std::sqrt(M_PI) * sum;
}

inline double normal_cdf_series(double x) {
  return 0.5 * (1.0 + erf_series(x / std::sqrt(2.0)));
}

// Lanczos (g = 7, n = 9) log-gamma for x > 0.
inline double lanczos_log_gamma(double x) {
  static const double c[9] = {0.99999999999980993,  676.5203681218851,
                              -1259.1392167224028,  771.32342877765313,
                              -176.61502916214059,  12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6,
                              1.5056327351493116e-7};
  if (x < 0.5) {
    // reflection
    return std::log(M_PI / std::sin(M_PI * x)) - lanczos_log_gamma(1.0 - x);
  }
  x -= 1.0;
  double a = c[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (x + i);
  return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

// Student-t density via Lanczos, independent of the library's gamma path.
inline double t_pdf(double x, int m) {
  const double lg =
      lanczos_log_gamma(0.5 * (m + 1)) - lanczos_log_gamma(0.5 * m);
  return std::exp(lg) / std::sqrt(m * M_PI) *
         std::pow(1.0 + x * x / m, -0.5 * (m + 1));
}

// Density of W = sqrt(chi^2_m / m) via Lanczos.
inline double w_pdf(double w, int m) {
  const double hm = 0.5 * m;
  double lp = std::log(2.0) + hm * std::log(hm) - lanczos_log_gamma(hm) -
              hm * w * w;
  if (m > 1) lp += (m - 1) * std::log(w);
  return std::exp(lp);
}

}  // namespace oracle

#endif
