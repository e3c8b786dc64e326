#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "scadci/quadrature.hpp"
#include "scadci/scad.hpp"
#include "scadci/stats.hpp"

using namespace scadci;

namespace {
const QuadratureSettings kDefault{};
}

TEST_CASE("constant integrates exactly") {
  const auto r = integrate([](double) { return 1.0; }, 0.0, 1.0, kDefault);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normal density mass on [-6, 6]") {
  const auto r = integrate([](double x) { return normal_pdf(x); }, -6.0, 6.0,
                           kDefault);
  const double expect = 1.0 - 2.0 * normal_cdf(-6.0);
  CHECK(std::fabs(r.value - expect) < 1e-12);
}

TEST_CASE("truncated W density mass is 1") {
  const double hi = w_upper_bound(3, 1e-12);
  const auto r =
      integrate([](double w) { return w_pdf(w, 3); }, 1e-13, hi, kDefault);
  CHECK(std::fabs(r.value - 1.0) < 1e-9);
}

TEST_CASE("|x| with a registered kink") {
  const double bp[1] = {0.0};
  const auto r = integrate_split([](double x) { return std::fabs(x); }, -1.0,
                                 1.0, bp, kDefault);
  CHECK(std::fabs(r.value - 1.0) < 1e-14);
}

TEST_CASE("SCAD threshold integral matches the piecewise antiderivative") {
  const double eta = 0.8;
  const double a = 3.7;
  const double bp[2] = {eta, 2.0 * eta};
  const auto r = integrate_split(
      [&](double x) { return scad_threshold(x, eta, a); }, 0.0, a * eta, bp,
      kDefault);
  // branch 1: int_eta^{2 eta} (x - eta) dx = eta^2 / 2; zero below eta
  const double part1 = 0.5 * eta * eta;
  // branch 2: int_{2 eta}^{a eta} ((a-1) x - a eta) / (a-2) dx
  const auto anti2 = [&](double x) {
    return (0.5 * (a - 1.0) * x * x - a * eta * x) / (a - 2.0);
  };
  const double part2 = anti2(a * eta) - anti2(2.0 * eta);
  CHECK(std::fabs(r.value - (part1 + part2)) < 1e-12);
}

TEST_CASE("no breakpoints reduces to plain integrate") {
  const auto f = [](double x) { return std::sin(3.0 * x) + x * x; };
  const auto a = integrate(f, 0.0, 2.0, kDefault);
  const auto b = integrate_split(f, 0.0, 2.0, {}, kDefault);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
}

TEST_CASE("linearity on random smooth integrands") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 20; ++rep) {
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng), c3 = u(rng);
    const double alpha = u(rng), beta = u(rng);
    const auto f = [&](double x) { return c0 + c1 * x + std::sin(c2 * x); };
    const auto g = [&](double x) { return std::cos(c3 * x) + x * x; };
    const auto combo = [&](double x) { return alpha * f(x) + beta * g(x); };
    const double lhs = integrate(combo, -1.5, 2.5, kDefault).value;
    const double rhs = alpha * integrate(f, -1.5, 2.5, kDefault).value +
                       beta * integrate(g, -1.5, 2.5, kDefault).value;
    CHECK(std::fabs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("splitting a smooth integrand changes nothing") {
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(x); };
  const double bp[3] = {-0.7, 0.1, 1.3};
  const auto a = integrate(f, -2.0, 2.0, kDefault);
  const auto b = integrate_split(f, -2.0, 2.0, bp, kDefault);
  CHECK(std::fabs(a.value - b.value) < 2e-9);
}

TEST_CASE("budget exhaustion carries the partial value") {
  QuadratureSettings st;
  st.max_subdivisions = 3;
  st.abs_tol = 1e-14;
  st.rel_tol = 1e-14;
  // integrable inverse square-root singularity, slow without subdivisions
  const auto f = [](double x) { return 1.0 / std::sqrt(std::fabs(x - 0.3)); };
  try {
    integrate(f, 0.0, 1.0, st);
    FAIL("expected quadrature_error");
  } catch (const quadrature_error& e) {
    CHECK(e.partial_value() > 0.0);
    CHECK(e.err_est() > 0.0);
  }
}

TEST_CASE("invalid range is rejected") {
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 1.0, 0.0, kDefault),
                  std::invalid_argument);
}

TEST_CASE("non-finite integrand is reported") {
  CHECK_THROWS_AS(
      integrate([](double x) { return 1.0 / (x - 0.5098); }, 0.0, 1.0, kDefault),
      std::exception);
}
