#ifndef SCADCI_MC_HPP
#define SCADCI_MC_HPP

#include <cstdint>
#include <string>

#include "scadci/problem.hpp"
#include "scadci/spline.hpp"

namespace scadci {

/// Monte Carlo estimate of coverage probability and scaled expected length,
/// with standard errors and seed provenance. Used as an independent check on
/// the quadrature pipeline, never as a primary result.
struct McEstimate {
  double coverage_est = 0.0;
  double coverage_se = 0.0;
  double sel_est = 0.0;
  double sel_se = 0.0;
  long long n_samples = 0;
  std::uint64_t seed = 0;
  double theta = 0.0;
};

/// Simulates the pivots directly: Theta_hat ~ N(theta, 1) and
/// W = sqrt(chi^2_m / m) independent, sigma fixed at 1 (scale equivariance
/// extends the conclusion to all sigma). Deterministic given the seed;
/// sample blocks run in parallel with per-block derived streams and a fixed
/// accumulation order. Requires n_samples >= 10^4.
McEstimate simulate(double theta, const SplineHalfWidth& s,
                    const ProblemConfig& cfg, long long n_samples,
                    std::uint64_t seed);

std::string mc_to_json(const McEstimate& est);

}  // namespace scadci

#endif
