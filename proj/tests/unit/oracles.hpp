// Test-only oracles, kept independent of the propagation backends they
// check.
#pragma once

#include <cmath>
#include <complex>

#include "eitflash/medium.hpp"
#include "eitflash/quadrature.hpp"

namespace eitflash::test {

// Eq.-(5)-style susceptibility written in the bracket form (prefactor times
// EIT correction factor), an independent algebraic route to the library's
// partial-fraction implementation.
inline std::complex<double> zeta_bracket_form(std::complex<double> delta,
                                              const MediumParams& m) {
  const std::complex<double> I{0.0, 1.0};
  const double g = m.gamma21;
  const std::complex<double> one_photon = delta + I * (0.5 * g);
  // chi * k L / b0 for the bare transition
  const std::complex<double> chi_hat = -(0.5 * g) / one_photon;
  std::complex<double> bracket{1.0, 0.0};
  if (m.omega_c > 0.0) {
    const std::complex<double> two_photon = delta - m.delta_c + I * (0.5 * m.gamma31);
    bracket = 1.0 / (1.0 - (0.25 * m.omega_c * m.omega_c) / (one_photon * two_photon));
  }
  // zeta = -(i/2) chi k L
  return -(I * 0.5) * m.b0 * chi_hat * bracket;
}

// Two-level step-on response in closed form:
//   E_on(tau) = 1 - Int_0^tau e^{(i dp - g/2) x} sqrt(K/x) J1(2 sqrt(K x)) dx,
//   K = b0 g / 4, evaluated on x = u^2 with a fixed composite rule.
inline std::complex<double> two_level_step_on_bessel(const MediumParams& m, double delta_p,
                                                     double tau) {
  if (tau <= 0.0) return {0.0, 0.0};
  const double K = 0.25 * m.b0 * m.gamma21;
  const double sqrt_k = std::sqrt(K);
  const double root = std::sqrt(tau);
  const std::complex<double> expo{-0.5 * m.gamma21, delta_p};
  auto integrand = [&](double u) -> std::complex<double> {
    return std::exp(expo * (u * u)) * std::cyl_bessel_j(1.0, 2.0 * sqrt_k * u);
  };
  const auto panels = std::size_t(std::ceil(root * sqrt_k * 6.0 / std::numbers::pi)) + 6;
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = root * double(p) / double(panels);
    const double b = root * double(p + 1) / double(panels);
    acc += quad::gk15(integrand, a, b).value;
  }
  return 1.0 - 2.0 * sqrt_k * acc;
}

}  // namespace eitflash::test
