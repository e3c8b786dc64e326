#ifndef SCADCI_PROBLEM_HPP
#define SCADCI_PROBLEM_HPP

namespace scadci {

/// Scalar problem instance for inference on a single regression coefficient
/// under an orthonormal design. Everything downstream works in the pivots
/// theta = beta_i/sigma and W = Sigma_hat/sigma, so only (m, alpha, eta, a)
/// matter. k and t_m are derived and must never be set independently.
struct ProblemConfig {
  int m = 200;          // residual degrees of freedom, m = n - p
  double alpha = 0.05;  // 1 - alpha is the nominal coverage
  double eta = 1.0;     // threshold tuning constant, lambda = Sigma_hat * eta
  double a = 3.7;       // SCAD shape constant, must exceed 2

  double k = 0.0;       // a * eta; the interval reverts to the usual one past k
  double t_m = 0.0;     // central t_m quantile: P(-t_m <= T <= t_m) = 1 - alpha

  // Validates inputs, derives k and t_m. Throws std::invalid_argument.
  static ProblemConfig make(int m, double alpha, double eta, double a = 3.7);
};

}  // namespace scadci

#endif
