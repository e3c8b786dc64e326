#include "scadci/spline_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace scadci {

using nlohmann::json;

std::string spline_to_json(const SplineHalfWidth& s, const ProblemConfig& cfg) {
  json j;
  j["m"] = cfg.m;
  j["alpha"] = cfg.alpha;
  j["eta"] = cfg.eta;
  j["a"] = cfg.a;
  j["q"] = s.q();
  j["knot_values"] = s.values;
  return j.dump(2);
}

SplineHalfWidth spline_from_json(const std::string& text,
                                 const ProblemConfig& cfg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("spline JSON parse error: ") + e.what());
  }

  const auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) {
      throw validation_error(std::string("spline JSON missing field: ") + key);
    }
    return *it;
  };

  const auto check_scalar = [&](const char* key, double expected) {
    const double got = need(key).get<double>();
    if (std::fabs(got - expected) > 1e-12 * std::max(1.0, std::fabs(expected))) {
      std::ostringstream os;
      os << "spline/config mismatch in field '" << key << "': file has " << got
         << ", config has " << expected;
      throw validation_error(os.str());
    }
  };

  if (need("m").get<int>() != cfg.m) {
    std::ostringstream os;
    os << "spline/config mismatch in field 'm': file has " << j["m"].get<int>()
       << ", config has " << cfg.m;
    throw validation_error(os.str());
  }
  check_scalar("alpha", cfg.alpha);
  check_scalar("eta", cfg.eta);
  check_scalar("a", cfg.a);

  const int q = need("q").get<int>();
  if (q < 3) throw validation_error("spline JSON field 'q' must be >= 3");

  std::vector<double> vals = need("knot_values").get<std::vector<double>>();
  if (static_cast<int>(vals.size()) != q) {
    std::ostringstream os;
    os << "spline JSON field 'knot_values' has " << vals.size()
       << " entries, expected q = " << q;
    throw validation_error(os.str());
  }
  if (std::fabs(vals.back() - cfg.t_m) > 1e-8) {
    std::ostringstream os;
    os << "spline JSON field 'knot_values': last value " << vals.back()
       << " must equal t(m) = " << cfg.t_m;
    throw validation_error(os.str());
  }

  return spline_fit(std::span<const double>(vals.data(), q - 1), cfg, q);
}

void save_spline(const std::string& path, const SplineHalfWidth& s,
                 const ProblemConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_spline: cannot open " + path);
  out << spline_to_json(s, cfg) << "\n";
}

SplineHalfWidth load_spline(const std::string& path, const ProblemConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw validation_error("load_spline: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return spline_from_json(ss.str(), cfg);
}

}  // namespace scadci
