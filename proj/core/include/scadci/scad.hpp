#ifndef SCADCI_SCAD_HPP
#define SCADCI_SCAD_HPP

#include <utility>

#include "scadci/problem.hpp"
#include "scadci/spline.hpp"

namespace scadci {

/// Standardized SCAD threshold h: soft-thresholds |x| <= 2*eta, blends
/// linearly on (2*eta, a*eta], and is the identity past a*eta. Odd and
/// continuous.
double scad_threshold(double x, double eta, double a);

/// Data-scale SCAD estimate, sigma_hat * h(beta_hat / sigma_hat).
/// Scale-equivariant; equals beta_hat once |beta_hat| > a*eta*sigma_hat.
/// Throws std::domain_error for sigma_hat <= 0.
double scad_estimate(double beta_hat, double sigma_hat, const ProblemConfig& cfg);

/// Endpoints of the candidate interval centred on the SCAD estimate with
/// half-width sigma_hat * s(|beta_hat|/sigma_hat). Reverts to the usual
/// t-interval once |beta_hat|/sigma_hat >= k.
std::pair<double, double> interval_endpoints(double beta_hat, double sigma_hat,
                                             const SplineHalfWidth& s,
                                             const ProblemConfig& cfg);

}  // namespace scadci

#endif
