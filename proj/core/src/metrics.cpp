#include "scadci/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "scadci/parallel.hpp"
#include "scadci/scad.hpp"
#include "scadci/stats.hpp"

namespace scadci {

namespace {

constexpr double kHalfLn2Pi = 0.91893853320467274178;
constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInvSqrtPi = 0.56418958354775628695;

// theta below this is treated as exactly zero; the subcase integration
// bounds theta/(h +/- s) degenerate there while the closed form stays exact.
constexpr double kThetaSnap = 1e-8;

double log_w_norm(int m) {
  const double hm = 0.5 * m;
  return kLn2 + hm * std::log(hm) - detail::log_gamma(hm);
}

// Integrand of the inner w-integrals: w^power exp(log_norm - m w^2/2) phi(wx - theta).
// One exp per evaluation keeps the nested quadrature cheap.
struct InnerIntegrand {
  double x;
  double theta;
  double power;       // m for coverage, m+1 for scaled length
  double m;
  double log_weight;  // log_w_norm(m) - 0.5 log(2 pi)

  double operator()(double w) const {
    const double z = w * x - theta;
    return std::exp(log_weight + power * std::log(w) -
                    0.5 * (m * w * w + z * z));
  }

  // Stationary point of the log-integrand; used as a panel breakpoint so the
  // adaptive rule cannot step over a narrow bump.
  double peak() const {
    const double A = m + x * x;
    const double B = theta * x;
    return (B + std::sqrt(B * B + 4.0 * A * power)) / (2.0 * A);
  }
};

double w_upper_bound_cached(int m, double tail_mass) {
  static std::map<std::pair<int, double>, double> memo;
  static std::mutex mu;
  const auto key = std::make_pair(m, tail_mass);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  const double v = w_upper_bound(m, tail_mass);
  std::lock_guard<std::mutex> lock(mu);
  memo.emplace(key, v);
  return v;
}

QuadResult inner_integral(double x, double theta, double power, int m,
                          double lo, double hi, const QuadratureSettings& st) {
  InnerIntegrand f{x, theta, power, static_cast<double>(m),
                   log_w_norm(m) - kHalfLn2Pi};
  const double pk = f.peak();
  if (pk > lo && pk < hi) {
    const double bp[1] = {pk};
    return integrate_split(f, lo, hi, bp, st);
  }
  return integrate(f, lo, hi, st);
}

double cp_inner_impl(double x, double theta, const SplineHalfWidth& s,
                     const ProblemConfig& cfg, const QuadratureSettings& st,
                     double w_max) {
  if (theta < 0.0) throw std::domain_error("cp_inner: theta must be >= 0");
  const double hv = scad_threshold(x, cfg.eta, cfg.a);
  const double sv = s_eval(s, std::fabs(x));
  const int m = cfg.m;

  if (theta < kThetaSnap) {
    if (hv - sv <= 0.0 && hv + sv >= 0.0) {
      const double x2m = x * x + m;
      return kInvSqrtPi *
             std::exp(detail::log_gamma(0.5 * (m + 1)) -
                      detail::log_gamma(0.5 * m) +
                      0.5 * m * (std::log(static_cast<double>(m)) - std::log(x2m)) -
                      0.5 * std::log(x2m));
    }
    return 0.0;
  }

  if (hv + sv <= 0.0) return 0.0;  // theta/w > 0 can never fall in the band

  const double lo = theta / (hv + sv);
  const double hi = (hv - sv > 0.0) ? std::min(theta / (hv - sv), w_max) : w_max;
  if (lo >= hi) return 0.0;
  return inner_integral(x, theta, static_cast<double>(m), m, lo, hi, st).value;
}

}  // namespace

namespace detail {

double effective_w_max(int m, int w_power, const QuadratureSettings& settings) {
  double w_hi = w_upper_bound_cached(m, settings.w_tail_mass);
  const double log_weight = log_w_norm(m) - kHalfLn2Pi;
  const double floor = std::max(settings.abs_tol * 1e-3, 1e-300);
  // Envelope of every inner integrand: phi is bounded by (2 pi)^(-1/2).
  const auto envelope = [&](double w) {
    return std::exp(log_weight + w_power * std::log(w) - 0.5 * m * w * w);
  };
  while (envelope(w_hi) > floor && w_hi < 1e6) w_hi *= 1.25;
  return w_hi;
}

std::vector<double> coverage_x_breakpoints(const SplineHalfWidth& s,
                                           const ProblemConfig& cfg) {
  const double k = cfg.k;
  std::vector<double> base;
  base.push_back(0.0);
  for (double v : {cfg.eta, 2.0 * cfg.eta}) {
    if (v < k) {
      base.push_back(v);
      base.push_back(-v);
    }
  }
  for (std::size_t i = 1; i + 1 < s.knots.size(); ++i) {
    base.push_back(s.knots[i]);
    base.push_back(-s.knots[i]);
  }
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());

  // Roots of h(x) +/- s(|x|) inside each smooth piece become integration
  // breakpoints: the inner integral's structure switches there.
  std::vector<double> pieces;
  pieces.push_back(-k);
  for (double b : base) pieces.push_back(b);
  pieces.push_back(k);

  std::vector<double> out = base;
  const auto add_roots = [&](auto&& g) {
    constexpr int kSamples = 12;
    for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
      const double a = pieces[p];
      const double b = pieces[p + 1];
      double prev_x = a;
      double prev_g = g(a);
      for (int i = 1; i <= kSamples; ++i) {
        const double xx = a + (b - a) * i / kSamples;
        const double gg = g(xx);
        if ((prev_g < 0.0 && gg > 0.0) || (prev_g > 0.0 && gg < 0.0)) {
          double lo = prev_x, hi = xx, glo = prev_g;
          for (int it = 0; it < 80 && hi - lo > 1e-14 * (1.0 + std::fabs(hi));
               ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if ((glo < 0.0) == (gm < 0.0)) {
              lo = mid;
              glo = gm;
            } else {
              hi = mid;
            }
          }
          out.push_back(0.5 * (lo + hi));
        }
        prev_x = xx;
        prev_g = gg;
      }
    }
  };
  add_roots([&](double x) {
    return scad_threshold(x, cfg.eta, cfg.a) - s_eval(s, std::fabs(x));
  });
  add_roots([&](double x) {
    return scad_threshold(x, cfg.eta, cfg.a) + s_eval(s, std::fabs(x));
  });

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

ThetaGrid ThetaGrid::uniform(double step, double max) {
  if (!(step > 0.0)) throw std::invalid_argument("ThetaGrid: step must be positive");
  ThetaGrid g;
  const int n = static_cast<int>(std::ceil(max / step - 1e-12));
  g.points.reserve(n + 1);
  for (int i = 0; i <= n; ++i) g.points.push_back(i * step);
  g.theta_max = g.points.back();
  return g;
}

ThetaGrid ThetaGrid::constraint_default(const ProblemConfig& cfg) {
  ThetaGrid g;
  for (int i = 0; i <= 40; ++i) g.points.push_back(i * 0.05);
  const double hi = cfg.k + cfg.t_m + 4.0;
  for (double t = 2.1; t <= hi + 1e-12; t += 0.1) g.points.push_back(t);
  g.theta_max = g.points.back();
  return g;
}

double sel_weight_theta0(double x, int m) {
  return std::exp(-kHalfLn2Pi + (0.5 * m + 1.0) *
                                    (std::log(static_cast<double>(m)) -
                                     std::log(x * x + m)));
}

double sel(double theta, const SplineHalfWidth& s, const ProblemConfig& cfg,
           const QuadratureSettings& settings) {
  const int m = cfg.m;
  const double t = cfg.t_m;
  const double w_max = detail::effective_w_max(m, m + 1, settings);
  const QuadratureSettings inner_st = settings.scaled(1e-2);

  const auto integrand = [&](double x) {
    const double weight = s_eval(s, std::fabs(x)) - t;
    if (weight == 0.0) return 0.0;
    return weight *
           inner_integral(x, theta, m + 1.0, m, 0.0, w_max, inner_st).value;
  };

  std::vector<double> bps;
  bps.push_back(0.0);
  for (std::size_t i = 1; i + 1 < s.knots.size(); ++i) {
    bps.push_back(s.knots[i]);
    bps.push_back(-s.knots[i]);
  }
  std::sort(bps.begin(), bps.end());

  const QuadResult outer =
      integrate_split(integrand, -cfg.k, cfg.k, bps, settings);
  return 1.0 + outer.value / (t * expected_w(m));
}

double sel_at_zero(const SplineHalfWidth& s, const ProblemConfig& cfg,
                   const QuadratureSettings& settings) {
  const int m = cfg.m;
  const double t = cfg.t_m;
  const auto integrand = [&](double x) {
    return (s_eval(s, x) - t) * sel_weight_theta0(x, m);
  };
  std::vector<double> bps(s.knots.begin() + 1, s.knots.end() - 1);
  const QuadResult r = integrate_split(integrand, 0.0, cfg.k, bps, settings);
  // sel_weight_theta0 already carries (2 pi)^(-1/2); doubling it for the
  // folded |x| symmetry yields the sqrt(2/pi) front factor.
  return 1.0 + 2.0 / (t * expected_w(m)) * r.value;
}

double b_func(double w, double theta, const ProblemConfig& cfg) {
  if (!(w > 0.0)) throw std::domain_error("b_func: w must be positive");
  const double up = std::min(cfg.t_m * w, cfg.k * w - theta);
  const double lo = std::max(-cfg.t_m * w, -cfg.k * w - theta);
  if (lo >= up) return 0.0;
  return normal_cdf(up) - normal_cdf(lo);
}

double cp_inner(double x, double theta, const SplineHalfWidth& s,
                const ProblemConfig& cfg, const QuadratureSettings& settings) {
  const double w_max = detail::effective_w_max(cfg.m, cfg.m, settings);
  return cp_inner_impl(x, theta, s, cfg, settings.scaled(1e-2), w_max);
}

double coverage(double theta, const SplineHalfWidth& s, const ProblemConfig& cfg,
                const QuadratureSettings& settings) {
  const double th = std::fabs(theta);  // even in theta
  const int m = cfg.m;
  const double w_max = detail::effective_w_max(m, m, settings);
  const QuadratureSettings inner_st = settings.scaled(1e-2);

  const std::vector<double> xbps = detail::coverage_x_breakpoints(s, cfg);
  const auto term1_f = [&](double x) {
    return cp_inner_impl(x, th, s, cfg, inner_st, w_max);
  };
  const QuadResult term1 =
      integrate_split(term1_f, -cfg.k, cfg.k, xbps, settings);

  const double log_norm = log_w_norm(m);
  const auto bterm_f = [&](double w) {
    const double b = b_func(w, th, cfg);
    if (b == 0.0) return 0.0;
    double lp = log_norm - 0.5 * m * w * w;
    if (m > 1) lp += (m - 1) * std::log(w);
    return b * std::exp(lp);
  };
  std::vector<double> wbps;
  if (th > 0.0) {
    wbps.push_back(th / (cfg.k + cfg.t_m));
    if (cfg.k != cfg.t_m) wbps.push_back(th / std::fabs(cfg.k - cfg.t_m));
  }
  const QuadResult term2 =
      integrate_split(bterm_f, 0.0, w_max, wbps, settings);

  return term1.value + 1.0 - cfg.alpha - term2.value;
}

std::pair<double, double> max_sel(const SplineHalfWidth& s,
                                  const ProblemConfig& cfg,
                                  const QuadratureSettings& settings,
                                  const ThetaGrid& grid) {
  const std::size_t n = grid.points.size();
  std::vector<double> vals(n);
  parallel_for(n, [&](std::size_t i) {
    vals[i] = sel(grid.points[i], s, cfg, settings);
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (vals[i] > vals[best]) best = i;
  }

  double a = grid.points[best > 0 ? best - 1 : 0];
  double b = grid.points[best + 1 < n ? best + 1 : n - 1];
  double best_val = vals[best];
  double best_theta = grid.points[best];

  // Golden-section refinement of the bracketing cell.
  constexpr double kGolden = 0.61803398874989484820;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = sel(x1, s, cfg, settings);
  double f2 = sel(x2, s, cfg, settings);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = sel(x2, s, cfg, settings);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = sel(x1, s, cfg, settings);
    }
    const double fc = std::max(f1, f2);
    const double xc = (f1 > f2) ? x1 : x2;
    if (fc > best_val) {
      best_val = fc;
      best_theta = xc;
    }
  }
  return {best_val, best_theta};
}

}  // namespace scadci
