#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "scadci/spline_io.hpp"
#include "scadci/stats.hpp"

namespace scadci::cli {

ProblemConfig RunConfig::problem() const {
  return ProblemConfig::make(m, alpha, eta, a);
}

QuadratureSettings RunConfig::quad() const {
  QuadratureSettings qs;
  qs.abs_tol = abs_tol;
  qs.rel_tol = rel_tol;
  qs.w_tail_mass = w_tail_mass;
  return qs;
}

double RunConfig::effective_theta_max() const {
  if (theta_max > 0.0) return theta_max;
  return a * eta + t_quantile(m, alpha) + 8.0;
}

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value);

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (...) {
    throw validation_error("config key '" + key + "': cannot parse value '" +
                           value + "'");
  }
  if (pos != value.size()) {
    throw validation_error("config key '" + key + "': trailing characters in '" +
                           value + "'");
  }
  return v;
}

template <>
int parse_number<int>(const std::string& key, const std::string& value) {
  const double v = parse_number<double>(key, value);
  if (v != std::floor(v)) {
    throw validation_error("config key '" + key + "': expected an integer, got '" +
                           value + "'");
  }
  return static_cast<int>(v);
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& key,
                                          const std::string& value) {
  try {
    return std::stoull(value);
  } catch (...) {
    throw validation_error("config key '" + key + "': cannot parse value '" +
                           value + "'");
  }
}

}  // namespace

void apply_config_entry(const std::string& key, const std::string& value,
                        RunConfig& cfg) {
  if (key == "m") {
    cfg.m = parse_number<int>(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_number<double>(key, value);
  } else if (key == "eta") {
    cfg.eta = parse_number<double>(key, value);
  } else if (key == "a") {
    cfg.a = parse_number<double>(key, value);
  } else if (key == "q") {
    cfg.q = parse_number<int>(key, value);
  } else if (key == "abs_tol") {
    cfg.abs_tol = parse_number<double>(key, value);
  } else if (key == "rel_tol") {
    cfg.rel_tol = parse_number<double>(key, value);
  } else if (key == "w_tail_mass") {
    cfg.w_tail_mass = parse_number<double>(key, value);
  } else if (key == "theta_step") {
    cfg.theta_step = parse_number<double>(key, value);
  } else if (key == "theta_max") {
    cfg.theta_max = parse_number<double>(key, value);
  } else if (key == "multistart") {
    cfg.multistart = parse_number<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else {
    throw validation_error("config: unknown key '" + key + "'");
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw validation_error("config: cannot open file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      const auto e = t.find_last_not_of(" \t\r");
      return t.substr(b, e - b + 1);
    };
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config: line " << lineno << " is not a 'key = value' assignment";
      throw validation_error(os.str());
    }
    apply_config_entry(trim(stripped.substr(0, eq)),
                       trim(stripped.substr(eq + 1)), cfg);
  }
}

}  // namespace scadci::cli
