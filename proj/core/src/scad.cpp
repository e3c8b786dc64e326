#include "scadci/scad.hpp"

#include <cmath>
#include <stdexcept>

namespace scadci {

double scad_threshold(double x, double eta, double a) {
  const double ax = std::fabs(x);
  const double sg = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  if (ax <= 2.0 * eta) return sg * std::max(ax - eta, 0.0);
  if (ax <= a * eta) return ((a - 1.0) * x - sg * a * eta) / (a - 2.0);
  return x;
}

double scad_estimate(double beta_hat, double sigma_hat, const ProblemConfig& cfg) {
  if (!(sigma_hat > 0.0)) {
    throw std::domain_error("scad_estimate: sigma_hat must be positive");
  }
  return sigma_hat * scad_threshold(beta_hat / sigma_hat, cfg.eta, cfg.a);
}

std::pair<double, double> interval_endpoints(double beta_hat, double sigma_hat,
                                             const SplineHalfWidth& s,
                                             const ProblemConfig& cfg) {
  const double centre = scad_estimate(beta_hat, sigma_hat, cfg);
  const double half = sigma_hat * s_eval(s, std::fabs(beta_hat) / sigma_hat);
  return {centre - half, centre + half};
}

}  // namespace scadci
