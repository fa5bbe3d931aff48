#pragma once

#include <complex>
#include <span>
#include <vector>

namespace eitflash {

enum class PulseKind { step_on, step_off, square, periodic_square };

// Incident waveform, normalized to |E_i| = 1 when on. The carrier rotation
// is factored out: envelopes take only the values {0, 1} and the probe
// detuning delta_p enters through the medium response evaluation.
//
// switch_time is the epoch of the (last) falling edge -- for step_on, the
// rising edge. Defaults keep the paper's t = 0+ convention:
//   step_off        : 1 for t < switch_time
//   step_on         : 1 for t > switch_time
//   square          : 1 on (switch_time - duration, switch_time)
//   periodic_square : 1 on (switch_time - T/2, switch_time) mod T (50% duty)
struct PulseSpec {
  PulseKind kind = PulseKind::step_off;
  double delta_p = 0.0;      // carrier detuning, gamma21 units
  double duration = 0.0;     // square only
  double period = 0.0;       // periodic_square only
  double switch_time = 0.0;

  void validate() const;
  double envelope(double t) const;
  bool has_falling_edge() const { return kind != PulseKind::step_on; }

  static PulseSpec make_step_on(double delta_p, double switch_time = 0.0);
  static PulseSpec make_step_off(double delta_p, double switch_time = 0.0);
  static PulseSpec make_square(double delta_p, double duration, double switch_time = 0.0);
  static PulseSpec make_periodic(double delta_p, double period, double switch_time = 0.0);
};

// envelope(t) as a complex amplitude.
std::complex<double> incident_amplitude(const PulseSpec& pulse, double t);

struct HarmonicCoeff {
  long n;
  std::complex<double> c;
};

// Exact Fourier-series coefficients of the 50%-duty periodic square on the
// on-interval (-T/2, 0) convention (series E_i(t) = sum c_n e^{-i n W t},
// W = 2 pi / T):  c_0 = 1/2, c_n = (1 - (-1)^n)/(2 pi i n).
// Throws ValidationError for non-periodic pulses.
std::vector<HarmonicCoeff> fourier_series_coeffs(const PulseSpec& pulse, long n_max);
std::complex<double> fourier_series_coeff(const PulseSpec& pulse, long n);

// Closed-form transform of the finite square envelope on (t_off - d, t_off),
//   E~(w) = e^{i w t_off} (1 - e^{-i w d}) / (i w),   E~(0) = d,
// under the e^{+iwt} forward convention of the propagation integral.
std::complex<double> square_spectrum(const PulseSpec& pulse, double omega);
std::vector<std::complex<double>> square_spectrum(const PulseSpec& pulse,
                                                  std::span<const double> omega_grid);

}  // namespace eitflash
