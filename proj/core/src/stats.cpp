#include "scadci/stats.hpp"
#include "scadci/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scadci {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kLn2 = 0.69314718055994530942;
}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace detail {

double log_gamma(double x) {
#if defined(__unix__) || defined(__APPLE__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

namespace {

// Continued fraction for the incomplete beta (Numerical Recipes style).
double betacf(double a, double b, double x) {
  constexpr double kFPMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFPMin) d = kFPMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFPMin) d = kFPMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFPMin) c = kFPMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFPMin) d = kFPMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFPMin) c = kFPMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("betacf: continued fraction did not converge");
}

// Series for the lower incomplete gamma P(a,x), x < a+1.
double gamma_p_series(double a, double x) {
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 2000;
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  throw std::runtime_error("gamma_p_series: no convergence");
}

// Continued fraction for the upper incomplete gamma Q(a,x), x >= a+1.
double gamma_q_cf(double a, double x) {
  constexpr double kFPMin = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 2000;
  double b = x + 1.0 - a;
  double c = 1.0 / kFPMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFPMin) d = kFPMin;
    c = b + an / c;
    if (std::fabs(c) < kFPMin) c = kFPMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      return h * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  throw std::runtime_error("gamma_q_cf: no convergence");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("reg_inc_beta: x outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double bt = std::exp(log_gamma(a + b) - log_gamma(a) - log_gamma(b) +
                             a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double reg_gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("reg_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double t_central_prob(int m, double t) {
  if (t <= 0.0) return 0.0;
  // P(|T| > t) = I_{m/(m+t^2)}(m/2, 1/2)
  const double x = m / (m + t * t);
  return 1.0 - reg_inc_beta(0.5 * m, 0.5, x);
}

}  // namespace detail

double t_quantile(int m, double alpha) {
  if (m < 1) throw std::domain_error("t_quantile: m must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("t_quantile: alpha must lie in (0,1)");
  }
  const double target = 1.0 - alpha;

  double lo = 0.0;
  double hi = 1.0;
  int expansions = 0;
  while (detail::t_central_prob(m, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 300) {
      std::ostringstream os;
      os << "t_quantile: bracket expansion failed, m=" << m << " alpha=" << alpha
         << " lo=" << lo << " hi=" << hi << " P(hi)=" << detail::t_central_prob(m, hi);
      throw std::runtime_error(os.str());
    }
  }

  for (int i = 0; i < 200 && hi - lo > 1e-13 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::t_central_prob(m, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > 1e-8) {
    std::ostringstream os;
    os << "t_quantile: bisection stalled, bracket [" << lo << ", " << hi << "]";
    throw std::runtime_error(os.str());
  }
  return 0.5 * (lo + hi);
}

double w_logpdf(double w, int m) {
  if (w <= 0.0) throw std::domain_error("w_logpdf: w must be positive");
  if (m < 1) throw std::domain_error("w_logpdf: m must be >= 1");
  const double half_m = 0.5 * m;
  double lp = kLn2 + half_m * std::log(half_m) - detail::log_gamma(half_m) -
              half_m * w * w;
  if (m > 1) lp += (m - 1) * std::log(w);
  return lp;
}

double w_pdf(double w, int m) { return std::exp(w_logpdf(w, m)); }

double expected_w(int m) {
  if (m < 1) throw std::domain_error("expected_w: m must be >= 1");
  return std::sqrt(2.0 / m) *
         std::exp(detail::log_gamma(0.5 * (m + 1)) - detail::log_gamma(0.5 * m));
}

double w_upper_bound(int m, double tail_mass) {
  if (m < 1) throw std::domain_error("w_upper_bound: m must be >= 1");
  if (!(tail_mass > 0.0 && tail_mass <= 0.01)) {
    throw std::domain_error("w_upper_bound: tail_mass must lie in (0, 0.01]");
  }
  // P(W > w) = Q(m/2, m w^2 / 2); bisect on c = m w^2 / 2.
  const double a = 0.5 * m;
  double lo = a;
  double hi = a;
  while (detail::reg_gamma_q(a, hi) > tail_mass) hi *= 2.0;
  while (detail::reg_gamma_q(a, lo) < tail_mass && lo > 1e-300) lo *= 0.5;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (detail::reg_gamma_q(a, mid) > tail_mass) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(hi / a);  // w = sqrt(2c/m) with c = hi and a = m/2
}

ProblemConfig ProblemConfig::make(int m, double alpha, double eta, double a) {
  if (m < 1) throw std::invalid_argument("ProblemConfig: m must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("ProblemConfig: alpha must lie in (0,1)");
  }
  if (!(eta > 0.0)) throw std::invalid_argument("ProblemConfig: eta must be positive");
  if (!(a > 2.0)) throw std::invalid_argument("ProblemConfig: a must exceed 2");
  ProblemConfig cfg;
  cfg.m = m;
  cfg.alpha = alpha;
  cfg.eta = eta;
  cfg.a = a;
  cfg.k = a * eta;
  cfg.t_m = t_quantile(m, alpha);
  return cfg;
}

}  // namespace scadci
