#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "eitflash/errors.hpp"
#include "eitflash/quadrature.hpp"

using namespace eitflash;
using std::numbers::pi;

TEST_CASE("gk15 panel on smooth integrands") {
  auto sq = [](double x) { return std::complex<double>{x * x, 0.0}; };
  auto r = quad::gk15(sq, 0.0, 1.0);
  CHECK(r.value.real() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  auto sine = [](double x) { return std::complex<double>{std::sin(x), 0.0}; };
  CHECK(quad::gk15(sine, 0.0, pi).value.real() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("adaptive refinement reaches tight tolerances") {
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-14;

  // peaked Lorentzian against arctan closed form
  auto lorentz = [](double x) {
    return std::complex<double>{1.0 / (x * x + 1e-6), 0.0};
  };
  std::vector<double> seeds = {-1.0, 0.0, 1.0};
  auto r = quad::adaptive(lorentz, seeds, opt);
  const double exact = 2.0 * std::atan(1.0 / 1e-3) / 1e-3;
  CHECK(r.value.real() == doctest::Approx(exact).epsilon(1e-11));
  CHECK(r.converged);

  // complex oscillatory: int_0^20pi e^{i x}/(1 + x) dx via many panels
  auto osc = [](double x) {
    return std::exp(std::complex<double>(0.0, x)) / (1.0 + x);
  };
  std::vector<double> seeds2;
  for (int k = 0; k <= 40; ++k) seeds2.push_back(20.0 * pi * k / 40.0);
  auto r2 = quad::adaptive(osc, seeds2, opt);
  // cross-check with a much finer independent partition
  std::vector<double> seeds3;
  for (int k = 0; k <= 4000; ++k) seeds3.push_back(20.0 * pi * k / 4000.0);
  auto r3 = quad::adaptive(osc, seeds3, opt);
  CHECK(std::abs(r2.value - r3.value) < 1e-11);
}

TEST_CASE("budget exhaustion reports the achieved error") {
  quad::Options opt;
  opt.rel_tol = 1e-15;
  opt.abs_tol = 1e-300;  // unreachable
  opt.max_panels = 8;
  auto f = [](double x) { return std::complex<double>{std::exp(-x * x) * std::cos(7.0 * x), 0.0}; };
  std::vector<double> seeds = {-3.0, 3.0};
  CHECK_THROWS_AS((void)quad::adaptive(f, seeds, opt), QuadratureError);
  try {
    (void)quad::adaptive(f, seeds, opt);
  } catch (const QuadratureError& e) {
    CHECK(e.achieved_error() > 0.0);
  }
}

TEST_CASE("breakpoints must increase") {
  auto f = [](double) { return std::complex<double>{1.0, 0.0}; };
  std::vector<double> bad = {1.0, 0.0};
  CHECK_THROWS_AS((void)quad::adaptive(f, bad, {}), ValidationError);
}
