#ifndef SCADCI_STATS_HPP
#define SCADCI_STATS_HPP

namespace scadci {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal distribution function, Phi(x) = 0.5 erfc(-x/sqrt(2)).
double normal_cdf(double x);

/// Quantile t(m) > 0 with P(-t(m) <= T <= t(m)) = 1 - alpha for T ~ t_m.
/// Bracketing bisection on the t CDF; absolute tolerance 1e-10.
/// Throws std::runtime_error with bracket diagnostics on non-convergence.
double t_quantile(int m, double alpha);

/// Density of W = Sigma_hat/sigma = sqrt(chi^2_m / m) at w > 0.
/// Throws std::domain_error for w <= 0.
double w_pdf(double w, int m);

/// log of w_pdf; safe for m = 200 where the gamma ratio overflows.
double w_logpdf(double w, int m);

/// E(W) = sqrt(2/m) Gamma((m+1)/2) / Gamma(m/2), computed in log space.
/// Lies in (0,1) and increases toward 1 with m.
double expected_w(int m);

/// Upper truncation point: smallest-practical w_hi with P(W > w_hi) <= tail_mass.
/// tail_mass must lie in (0, 0.01].
double w_upper_bound(int m, double tail_mass);

namespace detail {

// Thread-safe log-gamma for x > 0.
double log_gamma(double x);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double reg_inc_beta(double a, double b, double x);

// Regularized upper incomplete gamma Q(a,x).
double reg_gamma_q(double a, double x);

// P(-t <= T <= t) for T ~ t_m, t >= 0.
double t_central_prob(int m, double t);

}  // namespace detail

}  // namespace scadci

#endif
