#ifndef SCADCI_TOOLS_RUN_CONFIG_HPP
#define SCADCI_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <string>

#include "scadci/problem.hpp"
#include "scadci/quadrature.hpp"

namespace scadci::cli {

/// Flat key/value run configuration. Every key can come from the config file
/// (key = value lines, '#' comments) and can be overridden by a command-line
/// flag of the same name. Unknown file keys are rejected.
struct RunConfig {
  int m = 200;
  double alpha = 0.05;  // nominal non-coverage; 1 - alpha = 0.95
  double eta = 1.0;
  double a = 3.7;
  int q = 6;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double w_tail_mass = 1e-12;
  double theta_step = 0.05;
  double theta_max = 0.0;  // 0 means automatic: k + t(m) + 8
  int multistart = 4;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  ProblemConfig problem() const;
  QuadratureSettings quad() const;
  double effective_theta_max() const;
};

/// Parses a config file into cfg. Throws scadci::validation_error on unknown
/// keys or malformed values.
void load_config_file(const std::string& path, RunConfig& cfg);

/// Parses one "key = value" assignment (used for both file lines and
/// --set-style overrides). Throws scadci::validation_error.
void apply_config_entry(const std::string& key, const std::string& value,
                        RunConfig& cfg);

}  // namespace scadci::cli

#endif
