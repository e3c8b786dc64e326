#ifndef SCADCI_SPLINE_IO_HPP
#define SCADCI_SPLINE_IO_HPP

#include <stdexcept>
#include <string>

#include "scadci/problem.hpp"
#include "scadci/spline.hpp"

namespace scadci {

/// Input failed structural or cross-field validation (bad config keys,
/// spline/config mismatch, pinned value broken). Message names the field.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// JSON object {m, alpha, eta, a, q, knot_values:[v_1..v_q]}. Values are
/// emitted as shortest round-trip decimals, so save/load is bit-exact.
std::string spline_to_json(const SplineHalfWidth& s, const ProblemConfig& cfg);

/// Parses and validates against cfg: every scalar field must match and the
/// last knot value must equal the recomputed t(m) (tolerance 1e-8). Throws
/// validation_error naming the offending field.
SplineHalfWidth spline_from_json(const std::string& text, const ProblemConfig& cfg);

void save_spline(const std::string& path, const SplineHalfWidth& s,
                 const ProblemConfig& cfg);
SplineHalfWidth load_spline(const std::string& path, const ProblemConfig& cfg);

}  // namespace scadci

#endif
