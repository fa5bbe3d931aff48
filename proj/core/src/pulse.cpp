#include "eitflash/pulse.hpp"

#include <cmath>
#include <numbers>

#include "eitflash/errors.hpp"

namespace eitflash {

namespace {
constexpr std::complex<double> I{0.0, 1.0};
}

void PulseSpec::validate() const {
  if (kind == PulseKind::square && !(duration > 0.0))
    throw ValidationError("duration > 0");
  if (kind == PulseKind::periodic_square && !(period > 0.0))
    throw ValidationError("period > 0");
}

double PulseSpec::envelope(double t) const {
  const double u = t - switch_time;
  switch (kind) {
    case PulseKind::step_off:
      return u < 0.0 ? 1.0 : 0.0;
    case PulseKind::step_on:
      return u > 0.0 ? 1.0 : 0.0;
    case PulseKind::square:
      return (u > -duration && u < 0.0) ? 1.0 : 0.0;
    case PulseKind::periodic_square: {
      const double r = std::remainder(u, period);  // [-T/2, T/2]
      return (r > -0.5 * period && r < 0.0) ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

PulseSpec PulseSpec::make_step_on(double delta_p, double switch_time) {
  return {PulseKind::step_on, delta_p, 0.0, 0.0, switch_time};
}
PulseSpec PulseSpec::make_step_off(double delta_p, double switch_time) {
  return {PulseKind::step_off, delta_p, 0.0, 0.0, switch_time};
}
PulseSpec PulseSpec::make_square(double delta_p, double duration, double switch_time) {
  return {PulseKind::square, delta_p, duration, 0.0, switch_time};
}
PulseSpec PulseSpec::make_periodic(double delta_p, double period, double switch_time) {
  return {PulseKind::periodic_square, delta_p, 0.0, period, switch_time};
}

std::complex<double> incident_amplitude(const PulseSpec& pulse, double t) {
  return {pulse.envelope(t), 0.0};
}

std::complex<double> fourier_series_coeff(const PulseSpec& pulse, long n) {
  if (pulse.kind != PulseKind::periodic_square)
    throw ValidationError("fourier series defined for periodic_square only");
  pulse.validate();
  if (n == 0) return {0.5, 0.0};
  if (n % 2 == 0) return {0.0, 0.0};
  // (1 - (-1)^n) / (2 pi i n) = -i / (pi n) for odd n
  return {0.0, -1.0 / (std::numbers::pi * double(n))};
}

std::vector<HarmonicCoeff> fourier_series_coeffs(const PulseSpec& pulse, long n_max) {
  if (n_max < 0) throw ValidationError("n_max >= 0");
  std::vector<HarmonicCoeff> out;
  out.reserve(2 * n_max + 1);
  for (long n = -n_max; n <= n_max; ++n) out.push_back({n, fourier_series_coeff(pulse, n)});
  return out;
}

std::complex<double> square_spectrum(const PulseSpec& pulse, double omega) {
  if (pulse.kind != PulseKind::square)
    throw ValidationError("closed-form spectrum defined for square pulses only");
  pulse.validate();
  const double d = pulse.duration;
  if (omega == 0.0) return {d, 0.0};
  // (1 - e^{-i w d})/(i w) = [sin(wd) - 2 i sin^2(wd/2)] / w, cancellation-free
  const double x = omega * d;
  const double s_half = std::sin(0.5 * x);
  const std::complex<double> core{std::sin(x) / omega, -2.0 * s_half * s_half / omega};
  return std::exp(I * (omega * pulse.switch_time)) * core;
}

std::vector<std::complex<double>> square_spectrum(const PulseSpec& pulse,
                                                  std::span<const double> omega_grid) {
  std::vector<std::complex<double>> out(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i)
    out[i] = square_spectrum(pulse, omega_grid[i]);
  return out;
}

}  // namespace eitflash
