#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "eitflash/medium.hpp"
#include "eitflash/pulse.hpp"

namespace eitflash {

// Uniform frequency grid for the transform backend. The grid covers
// [-span, span) with n_points samples; the conjugate time grid has step
// dt = pi/span and periodization window 2 pi / resolution.
struct SpectralGrid {
  double span = 0.0;        // one-sided extent, gamma21 units
  std::size_t n_points = 0; // power of two

  double resolution() const { return 2.0 * span / double(n_points); }
  double dt() const { return std::numbers::pi / span; }
  double window() const { return double(n_points) * dt(); }

  // Smallest grid satisfying the coverage/resolution invariants for these
  // parameters (span >= 8 b0 gamma21; resolution resolves gamma31, the
  // fringe scale delta_pi/20, the slow-light delay, and the settling
  // window of the pulse).
  static SpectralGrid recommend(const MediumParams& medium, const PulseSpec& pulse);

  // Throws GridError when an invariant is violated.
  void validate(const MediumParams& medium, const PulseSpec& pulse) const;
};

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;
};

// Window that frames the pulse with the lead-in and settling margins used
// by the grid recommendation.
TimeWindow default_time_window(const MediumParams& medium, const PulseSpec& pulse);

// Sampled complex transmitted amplitude E(t), |E_i| = 1 normalization.
struct FieldTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<std::complex<double>> samples;
  PulseSpec pulse{};
  MediumParams medium{};
  SpectralGrid grid{};        // zero-initialized for quadrature/series traces
  double edge_residual = 0.0; // max |E| at the periodization window edges

  std::size_t size() const { return samples.size(); }
  double time_at(std::size_t i) const { return t0 + dt * double(i); }
  double end_time() const { return samples.empty() ? t0 : time_at(samples.size() - 1); }
  double intensity_at(std::size_t i) const { return std::norm(samples[i]); }
  std::size_t index_of(double t) const;       // nearest sample index
  std::complex<double> at_time(double t) const { return samples[index_of(t)]; }
};

struct QuadratureControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-9;
  std::size_t max_panels = 500000;
  int hermite_order = 64;
  // Summed truncation budget for the Fourier-series backend tail.
  double series_tail_tol = 1e-6;
  std::size_t max_harmonics = 10000000;
};

// Monochromatic response H(delta_p) = exp(-zeta(delta_p)), Doppler-aware.
std::complex<double> steady_state(const MediumParams& medium, double delta_p);

// Time after a step ignition by which the transmitted field equals the
// steady value to below any backend tolerance (set by the slowest
// susceptibility pole and the EIT window transient).
double steady_settle_time(const MediumParams& medium);

// --- transform backend: full traces for square / periodic_square pulses ---
//
// E(t) = E_i(t) + (1/2pi) Int E~_i(W) [H(delta_p + W) - 1] e^{-iWt} dW
// evaluated by FFT on `grid`; the incident term is added exactly in the
// time domain. `stride` decimates the stored samples; `workers` bounds the
// threads used for the spectrum fill (0 = hardware concurrency).
FieldTrace transmit_trace(const PulseSpec& pulse, const MediumParams& medium,
                          const SpectralGrid& grid, const TimeWindow& window,
                          std::size_t stride = 1, int workers = 0);
// Recommended grid and default window.
FieldTrace transmit_trace(const PulseSpec& pulse, const MediumParams& medium,
                          std::size_t stride = 1, int workers = 0);

// Low-level entry: arbitrary incident spectrum (forward convention
// E~(W) = Int E_i(t) e^{+iWt} dt) with the matching exact time-domain
// incident samples. Used by transmit_trace and by linearity checks.
FieldTrace transmit_spectrum(const std::function<std::complex<double>(double)>& spectrum,
                             const std::function<std::complex<double>(double)>& incident,
                             const PulseSpec& pulse, const MediumParams& medium,
                             const SpectralGrid& grid, const TimeWindow& window,
                             std::size_t stride = 1, int workers = 0);

// --- quadrature backend: single time samples for step / square pulses ---
//
// Step-on response (switch at s, tau = t - s):
//   E_on(tau) = H(delta_p) u(tau)
//             + (i/2pi) Int [H(delta_p+W) - H(delta_p)] e^{-iW tau} / W dW,
// the integrand regular at W = 0. The infinite oscillatory tails are taken
// along descent contours in the half-plane where e^{-iW tau} decays (the
// response is analytic there). Step-off by linearity, squares as a
// difference of two step-on responses; periodic pulses dispatch to the
// series backend.
std::complex<double> transmit_sample(const PulseSpec& pulse, const MediumParams& medium,
                                     double t, const QuadratureControl& ctl = {});

// --- series backend: exact steady periodic response ---
//
// E(t) = E_i(t) + sum_n c_n [H(delta_p + n Wm) - 1] e^{-i n Wm (t - s)},
// Wm = 2 pi / T, truncated with a summed tail below series_tail_tol at
// evaluation points >= tau_f/100 from an edge. Slow modulation
// (T >> settle time) is evaluated as a time-domain alias sum of
// single-square responses instead.
std::complex<double> transmit_periodic_sample(const PulseSpec& pulse,
                                              const MediumParams& medium, double t,
                                              const QuadratureControl& ctl = {});
FieldTrace transmit_periodic(const PulseSpec& pulse, const MediumParams& medium,
                             const TimeWindow& window, std::size_t n_samples,
                             const QuadratureControl& ctl = {});

}  // namespace eitflash
