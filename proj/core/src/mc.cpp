#include "scadci/mc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "scadci/parallel.hpp"
#include "scadci/scad.hpp"
#include "scadci/stats.hpp"

namespace scadci {

namespace {

// splitmix64; used to derive independent per-block engine seeds.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4ecda5ec94a4bULL;
  return z ^ (z >> 31);
}

struct BlockSums {
  double cover = 0.0;
  double len = 0.0;
  double len2 = 0.0;
};

}  // namespace

McEstimate simulate(double theta, const SplineHalfWidth& s,
                    const ProblemConfig& cfg, long long n_samples,
                    std::uint64_t seed) {
  if (n_samples < 10000) {
    throw std::invalid_argument("simulate: n_samples must be >= 10^4");
  }

  const int m = cfg.m;
  const double denom = cfg.t_m * expected_w(m);
  constexpr long long kBlock = 1 << 18;
  const long long n_blocks = (n_samples + kBlock - 1) / kBlock;

  std::vector<BlockSums> partial(n_blocks);
  parallel_for(static_cast<std::size_t>(n_blocks), [&](std::size_t bi) {
    const long long lo = static_cast<long long>(bi) * kBlock;
    const long long hi = std::min(n_samples, lo + kBlock);
    std::mt19937_64 rng(mix64(seed ^ mix64(bi + 1)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::gamma_distribution<double> gamma(0.5 * m, 2.0);

    BlockSums sums;
    for (long long i = lo; i < hi; ++i) {
      // chi^2_m: explicit sum of squares for small m, gamma sampler otherwise
      double chi2 = 0.0;
      if (m <= 10) {
        for (int j = 0; j < m; ++j) {
          const double z = normal(rng);
          chi2 += z * z;
        }
      } else {
        chi2 = gamma(rng);
      }
      const double w = std::sqrt(chi2 / m);
      const double theta_hat = theta + normal(rng);

      const auto [lo_end, hi_end] = interval_endpoints(theta_hat, w, s, cfg);
      if (theta >= lo_end && theta <= hi_end) sums.cover += 1.0;

      const double len = w * s_eval(s, std::fabs(theta_hat) / w) / denom;
      sums.len += len;
      sums.len2 += len * len;
    }
    partial[bi] = sums;
  });

  double cover = 0.0, len = 0.0, len2 = 0.0;
  for (const auto& p : partial) {
    cover += p.cover;
    len += p.len;
    len2 += p.len2;
  }

  const double n = static_cast<double>(n_samples);
  McEstimate est;
  est.theta = theta;
  est.n_samples = n_samples;
  est.seed = seed;
  est.coverage_est = cover / n;
  est.sel_est = len / n;
  const double cover_var =
      (cover - n * est.coverage_est * est.coverage_est) / (n - 1.0);
  const double len_var = (len2 - n * est.sel_est * est.sel_est) / (n - 1.0);
  est.coverage_se = std::sqrt(std::max(cover_var, 0.0) / n);
  est.sel_se = std::sqrt(std::max(len_var, 0.0) / n);
  return est;
}

std::string mc_to_json(const McEstimate& est) {
  nlohmann::json j;
  j["theta"] = est.theta;
  j["coverage_est"] = est.coverage_est;
  j["coverage_se"] = est.coverage_se;
  j["sel_est"] = est.sel_est;
  j["sel_se"] = est.sel_se;
  j["n_samples"] = est.n_samples;
  j["seed"] = est.seed;
  return j.dump(2);
}

}  // namespace scadci
