#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "scadci/mc.hpp"
#include "scadci/metrics.hpp"
#include "scadci/scad.hpp"
#include "scadci/stats.hpp"
#include "support/test_oracles.hpp"

using namespace scadci;

namespace {

const QuadratureSettings kQs{};

ProblemConfig cfgA() { return ProblemConfig::make(200, 0.05, 1.0); }
ProblemConfig cfgB() { return ProblemConfig::make(3, 0.05, 2.0); }

// test spline A: m = 200, eta = 1, q = 6
SplineHalfWidth splineA() {
  std::vector<double> v = {2.2, 2.1, 2.3, 1.9, 2.0};
  return spline_fit(v, cfgA(), 6);
}

// test spline B: m = 3, eta = 2, q = 5
SplineHalfWidth splineB() {
  std::vector<double> v = {3.5, 3.0, 2.8, 3.3};
  return spline_fit(v, cfgB(), 5);
}

SplineHalfWidth constant_spline(const ProblemConfig& cfg, double value, int q) {
  std::vector<double> v(q - 1, value);
  return spline_fit(v, cfg, q);
}

// Fixed-grid midpoint oracle for the coverage inner integral: integrates the
// raw indicator form without any subcase decomposition.
double cp_inner_riemann(double x, double theta, const SplineHalfWidth& s,
                        const ProblemConfig& cfg, long n) {
  const double hv = scad_threshold(x, cfg.eta, cfg.a);
  const double sv = s_eval(s, std::fabs(x));
  const double hi = w_upper_bound(cfg.m, 1e-14) * 1.5;
  const double h = hi / n;
  double sum = 0.0;
  for (long i = 0; i < n; ++i) {
    const double w = (i + 0.5) * h;
    const double r = theta / w;
    if (r < hv - sv || r > hv + sv) continue;
    sum += normal_pdf(w * x - theta) * w * w_pdf(w, cfg.m);
  }
  return sum * h;
}

}  // namespace

TEST_CASE("sel_weight_theta0 closed form vs quadrature") {
  CHECK(sel_weight_theta0(0.0, 3) ==
        doctest::Approx(0.3989422804).epsilon(1e-9));
  CHECK(sel_weight_theta0(0.0, 200) ==
        doctest::Approx(0.3989422804).epsilon(1e-9));
  for (const auto& [x, m] : {std::pair{1.0, 3}, {1.0, 200}, {2.5, 200}}) {
    const double hi = w_upper_bound(m, 1e-14);
    const double byquad = oracle::simpson(
        [x = x, m = m](double w) {
          return w <= 0.0 ? 0.0 : normal_pdf(w * x) * w * w * oracle::w_pdf(w, m);
        },
        0.0, hi, 40000);
    CHECK(std::fabs(sel_weight_theta0(x, m) - byquad) < 1e-9);
  }
  // decays monotonically in |x|
  double prev = sel_weight_theta0(0.0, 10);
  for (double x = 0.25; x < 6.0; x += 0.25) {
    const double cur = sel_weight_theta0(x, 10);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("sel is identically 1 for the constant t(m) spline") {
  const auto cfg = cfgA();
  const auto s = constant_spline(cfg, cfg.t_m, 6);
  for (double th : {0.0, 0.5, 1.0, 5.0}) {
    CHECK(std::fabs(sel(th, s, cfg, kQs) - 1.0) < 1e-8);
  }
  CHECK(std::fabs(sel_at_zero(s, cfg, kQs) - 1.0) < 1e-10);
}

TEST_CASE("sel reference values from an independent implementation") {
  const auto cfg = cfgA();
  const auto s = splineA();
  CHECK(sel(0.0, s, cfg, kQs) == doctest::Approx(1.08848196699).epsilon(2e-8));
  CHECK(sel(0.5, s, cfg, kQs) == doctest::Approx(1.0871696353).epsilon(2e-8));
  CHECK(sel(2.0, s, cfg, kQs) == doctest::Approx(1.04867524369).epsilon(2e-8));
  const auto cfg3 = cfgB();
  const auto sB = splineB();
  CHECK(sel(0.0, sB, cfg3, kQs) == doctest::Approx(1.02987701858).epsilon(2e-8));
  CHECK(sel(1.0, sB, cfg3, kQs) == doctest::Approx(1.00484280156).epsilon(2e-8));
}

TEST_CASE("sel decays to 1 far out") {
  const auto cfg = cfgA();
  const auto s = splineA();
  CHECK(std::fabs(sel(30.0, s, cfg, kQs) - 1.0) < 1e-6);
  CHECK(std::fabs(sel(cfg.k + cfg.t_m + 10.0, s, cfg, kQs) - 1.0) < 1e-5);
}

TEST_CASE("sel is even in theta (formula evaluated at negative theta)") {
  const auto cfg = cfgA();
  const auto s = splineA();
  for (double th : {0.3, 1.1, 2.6}) {
    CHECK(std::fabs(sel(th, s, cfg, kQs) - sel(-th, s, cfg, kQs)) < 1e-9);
  }
}

TEST_CASE("sel at zero agrees between the double and single integral forms") {
  const auto cfg = cfgA();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.5, 3.5);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> v(5);
    for (auto& vi : v) vi = u(rng);
    const auto s = spline_fit(v, cfg, 6);
    CHECK(std::fabs(sel(0.0, s, cfg, kQs) - sel_at_zero(s, cfg, kQs)) < 1e-7);
  }
}

TEST_CASE("sel_at_zero equals the weighted Simpson integral of s - t") {
  // widened spline (the right end stays pinned at t(m))
  const auto cfg = cfgA();
  const auto s = constant_spline(cfg, cfg.t_m + 1.0, 6);
  const double wint = oracle::simpson(
      [&](double x) { return (s_eval(s, x) - cfg.t_m) * sel_weight_theta0(x, cfg.m); },
      0.0, cfg.k, 20000);
  const double expect = 1.0 + 2.0 / (cfg.t_m * expected_w(cfg.m)) * wint;
  CHECK(sel_at_zero(s, cfg, kQs) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(expect > 1.0);  // widening strictly lengthens the interval
}

TEST_CASE("b_func resolves the min/max correctly") {
  const auto cfg = cfgA();  // k = 3.7 > t
  for (double w : {0.3, 1.0, 1.4}) {
    CHECK(b_func(w, 0.0, cfg) ==
          doctest::Approx(2.0 * normal_cdf(cfg.t_m * w) - 1.0).epsilon(1e-13));
    // far theta pushes the window away entirely
    const double th = (cfg.k + cfg.t_m) * w + 1.0;
    CHECK(b_func(w, th, cfg) == 0.0);
  }
  // k < t resolves to +-kw at theta = 0
  const auto small = ProblemConfig::make(3, 0.05, 0.3);
  REQUIRE(small.k < small.t_m);
  for (double w : {0.5, 1.0}) {
    CHECK(b_func(w, 0.0, small) ==
          doctest::Approx(2.0 * normal_cdf(small.k * w) - 1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(b_func(0.0, 0.0, cfg), std::domain_error);
}

TEST_CASE("cp_inner closed form at theta = 0") {
  const auto cfg = cfgB();
  const auto s = splineB();
  // x = 0: h = 0, s > 0, value Gamma((m+1)/2) / (Gamma(m/2) sqrt(pi m))
  CHECK(cp_inner(0.0, 0.0, s, cfg, kQs) ==
        doctest::Approx(0.367552596947861).epsilon(1e-10));
  const auto cfgm200 = cfgA();
  const auto sA = splineA();
  CHECK(cp_inner(0.0, 0.0, sA, cfgm200, kQs) ==
        doctest::Approx(0.398443916169911).epsilon(1e-10));
}

TEST_CASE("cp_inner subcase (c) vanishes") {
  const auto cfg = cfgB();
  const auto s = splineB();
  // x = -k: h = -k = -7.4, s(k) = t(3) = 3.18, h + s < 0
  REQUIRE(scad_threshold(-cfg.k, cfg.eta, cfg.a) + s_eval(s, cfg.k) < 0.0);
  CHECK(cp_inner(-cfg.k, 1.0, s, cfg, kQs) == 0.0);
}

TEST_CASE("cp_inner against the fixed-grid indicator oracle") {
  const auto cfgm200 = cfgA();
  const auto sA = splineA();
  // subcase (a) at x = k: h = k, s = t(m)
  CHECK(std::fabs(cp_inner(cfgm200.k, 1.0, sA, cfgm200, kQs) -
                  cp_inner_riemann(cfgm200.k, 1.0, sA, cfgm200, 8000000)) <
        1e-7);
  // subcase (b) at small x and a subcase (a) interior point, m = 3
  const auto cfg3 = cfgB();
  const auto sB = splineB();
  CHECK(std::fabs(cp_inner(0.4, 0.8, sB, cfg3, kQs) -
                  cp_inner_riemann(0.4, 0.8, sB, cfg3, 8000000)) < 1e-7);
  CHECK(std::fabs(cp_inner(5.1, 2.0, sB, cfg3, kQs) -
                  cp_inner_riemann(5.1, 2.0, sB, cfg3, 8000000)) < 1e-7);
  CHECK_THROWS_AS(cp_inner(0.4, -0.2, sB, cfg3, kQs), std::domain_error);
}

TEST_CASE("coverage reference values from an independent implementation") {
  const auto cfg = cfgA();
  const auto s = splineA();
  CHECK(coverage(0.0, s, cfg, kQs) ==
        doctest::Approx(0.988985032568).epsilon(2e-8));
  CHECK(coverage(1.5, s, cfg, kQs) ==
        doctest::Approx(0.978902606344).epsilon(2e-7));
  CHECK(coverage(3.0, s, cfg, kQs) ==
        doctest::Approx(0.838196761117).epsilon(2e-7));
  const auto cfg3 = cfgB();
  const auto sB = splineB();
  CHECK(coverage(0.0, sB, cfg3, kQs) ==
        doctest::Approx(0.981425628574).epsilon(2e-7));
  CHECK(coverage(2.5, sB, cfg3, kQs) ==
        doctest::Approx(0.856830633355).epsilon(2e-7));
}

TEST_CASE("coverage tends to 1 - alpha far out") {
  const auto cfg = cfgA();
  const auto s = constant_spline(cfg, cfg.t_m, 6);
  CHECK(std::fabs(coverage(50.0, s, cfg, kQs) - 0.95) < 1e-5);
  const auto sA = splineA();
  CHECK(std::fabs(coverage(cfg.k + cfg.t_m + 10.0, sA, cfg, kQs) - 0.95) < 1e-5);
}

TEST_CASE("coverage is even in theta") {
  const auto cfg = cfgA();
  const auto s = splineA();
  for (double th : {0.4, 1.5, 3.0}) {
    CHECK(std::fabs(coverage(th, s, cfg, kQs) - coverage(-th, s, cfg, kQs)) <
          1e-9);
  }
}

TEST_CASE("interval degenerates to the usual one as eta -> 0") {
  // with s == t(m) on a shrinking [0, k], coverage reverts to 1 - alpha
  const auto tiny = ProblemConfig::make(10, 0.05, 1e-4);
  const auto s = constant_spline(tiny, tiny.t_m, 4);
  for (double th : {0.0, 0.5, 2.0}) {
    CHECK(std::fabs(coverage(th, s, tiny, kQs) - 0.95) < 1e-5);
  }
}

TEST_CASE("coverage and sel are insensitive to halving the tolerance") {
  const auto cfg = cfgA();
  const auto s = splineA();
  QuadratureSettings half = kQs;
  half.abs_tol *= 0.5;
  half.rel_tol *= 0.5;
  CHECK(std::fabs(coverage(1.5, s, cfg, kQs) - coverage(1.5, s, cfg, half)) <
        1e-6);
  CHECK(std::fabs(sel(0.5, s, cfg, kQs) - sel(0.5, s, cfg, half)) < 1e-6);
  CHECK(std::fabs(sel_at_zero(s, cfg, kQs) - sel_at_zero(s, cfg, half)) < 1e-6);
}

TEST_CASE("max_sel of the constant t(m) spline is 1") {
  const auto cfg = cfgA();
  const auto s = constant_spline(cfg, cfg.t_m, 6);
  const auto grid = ThetaGrid::uniform(0.05, cfg.k + cfg.t_m + 8.0);
  const auto [val, arg] = max_sel(s, cfg, kQs, grid);
  CHECK(std::fabs(val - 1.0) < 1e-8);
}

TEST_CASE("max_sel dominates grid values and refines the peak") {
  const auto cfg = cfgA();
  const auto s = splineA();
  const auto grid = ThetaGrid::uniform(0.05, cfg.k + cfg.t_m + 8.0);
  const auto [val, arg] = max_sel(s, cfg, kQs, grid);
  CHECK(val >= sel(0.0, s, cfg, kQs) - 1e-12);
  CHECK(val >= sel(arg, s, cfg, kQs) - 1e-9);
  for (double th : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    CHECK(val >= sel(th, s, cfg, kQs) - 1e-9);
  }
}

TEST_CASE("quadrature agrees with Monte Carlo on a quick battery") {
  struct Case {
    double theta;
    int m;
    double eta;
  };
  const Case cases[] = {{0.0, 200, 1.0}, {0.8, 3, 2.0}, {2.0, 200, 1.0}};
  for (const auto& c : cases) {
    const auto cfg = ProblemConfig::make(c.m, 0.05, c.eta);
    std::vector<double> v(4, cfg.t_m + 0.4);
    v[0] = cfg.t_m + 1.0;
    const auto s = spline_fit(v, cfg, 5);
    const auto mc = simulate(c.theta, s, cfg, 400000, 97531);
    const double cq = coverage(c.theta, s, cfg, kQs);
    const double sq = sel(c.theta, s, cfg, kQs);
    CHECK(std::fabs(cq - mc.coverage_est) < 4.0 * mc.coverage_se);
    CHECK(std::fabs(sq - mc.sel_est) < 4.0 * mc.sel_se);
  }
}

TEST_CASE("ThetaGrid construction") {
  const auto g = ThetaGrid::uniform(0.5, 2.0);
  REQUIRE(g.points.size() == 5);
  CHECK(g.points.front() == 0.0);
  CHECK(g.points.back() == doctest::Approx(2.0));
  const auto cfg = cfgA();
  const auto cg = ThetaGrid::constraint_default(cfg);
  CHECK(cg.points.front() == 0.0);
  CHECK(cg.points.back() >= cfg.k + cfg.t_m + 3.9);
  for (std::size_t i = 1; i < cg.points.size(); ++i) {
    CHECK(cg.points[i] > cg.points[i - 1]);
  }
  CHECK_THROWS_AS(ThetaGrid::uniform(-0.1, 2.0), std::invalid_argument);
}
