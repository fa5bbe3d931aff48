#pragma once

#include <span>
#include <vector>

#include "eitflash/decompose.hpp"
#include "eitflash/propagate.hpp"

namespace eitflash {

// 1D sweep of the extinction intensity I(0+) over probe detuning.
struct FringeScan {
  std::vector<double> detunings;  // gamma21 units, strictly increasing
  std::vector<double> i0plus;
  MediumParams medium;
  PulseSpec pulse;
};

// 2D sweep of I(0+) over modulation period and probe detuning, row-major
// (periods x detunings).
struct ModulationMap {
  std::vector<double> periods;
  std::vector<double> detunings;
  std::vector<double> values;
  double at(std::size_t period_idx, std::size_t detuning_idx) const {
    return values[period_idx * detunings.size() + detuning_idx];
  }
};

struct FlashMetrics {
  double i0plus = 0.0;
  double tau_f_fit = 0.0;
  double i_max = 0.0;
  double i_min = 0.0;
  double contrast = 0.0;  // (i_max - i_min)/(i_max + i_min)
};

struct FringeMaximum {
  double delta_p = 0.0;
  double value = 0.0;
};

// I(0+): squared transmitted amplitude sampled tau_f/100 after the falling
// edge (quadrature backend; series backend for periodic drive). Throws
// ValidationError for pulses without a falling edge.
double flash_amplitude(const MediumParams& medium, const PulseSpec& pulse,
                       const QuadratureControl& ctl = {});

FringeScan fringe_scan(const MediumParams& medium, const PulseSpec& pulse,
                       std::span<const double> detunings, int workers = 0,
                       const QuadratureControl& ctl = {});

std::vector<FringeScan> fringe_map_vs_b0(std::span<const double> b0_grid,
                                         const MediumParams& medium, const PulseSpec& pulse,
                                         std::span<const double> detunings, int workers = 0,
                                         const QuadratureControl& ctl = {});

// First local maximum of I(0+) for increasing delta_p from 0: coarse grid
// bracketing at step delta_pi/20 followed by golden-section refinement.
// Throws NumericalError("no fringe maximum ...") when the scan is monotone.
FringeMaximum first_fringe_maximum(const MediumParams& medium, const PulseSpec& pulse,
                                   const QuadratureControl& ctl = {}, int workers = 0);

// Uniformly sampled trace built from the quadrature backend (used where the
// transform grid cannot resolve the flash window).
FieldTrace quadrature_trace(const PulseSpec& pulse, const MediumParams& medium,
                            double t_begin, double t_end, std::size_t n_samples,
                            int workers = 0, const QuadratureControl& ctl = {});

// Least-squares fit of ln I(t) to a linear decay over [t_start, t_end];
// returns the fitted intensity decay time (-1/slope). Throws FitError on a
// non-negative slope or a residual norm above threshold.
double fit_flash_decay(const FieldTrace& trace, double t_start, double t_end,
                       double max_rms_residual = 0.75);

enum class DelayEstimator { threshold_crossing, derivative_centroid, amplitude_midpoint };

// Slow-light rise delay from a step-on/square trace: time from probe
// ignition until I(t) first reaches (1 - 1/e) I_steady, the precursor spike
// excluded by ignoring t < ignition + 20 tau_f. Alternatives: the centroid
// of dI/dt over the rise, and the |E| half-maximum crossing -- the envelope
// midpoint arrival, which is unbiased by the width of the transparency
// window (the default crossing sits ~0.8 window widths late). Throws
// ThresholdNotReached when steady transmission < 0.1.
double measure_group_delay(const FieldTrace& trace,
                           DelayEstimator estimator = DelayEstimator::threshold_crossing);

// I(0+) over (period, detuning) grids via the series backend, each falling
// edge sampled at the 0+ convention.
ModulationMap modulation_map(const MediumParams& medium, std::span<const double> periods,
                             std::span<const double> detunings, int workers = 0,
                             const QuadratureControl& ctl = {});

struct ContrastPoint {
  double period = 0.0;
  double i_max = 0.0;
  double i_min = 0.0;
  double contrast = 0.0;
  double delta_at_max = 0.0;
};

// Per-period first fringe maximum and resonance minimum of a modulation
// map. Requires the detuning grid to contain delta_p = 0; throws
// NumericalError("no fringe maximum ...") for monotone rows.
std::vector<ContrastPoint> contrast_curve(const ModulationMap& map);

// Fast-modulation closed form |E_i(t) + (e^{i phi_EIT} - 1)/2|^2 with
// phi_EIT = delta_p tau_EIT. Throws ValidationError when T > tau_f/10.
double fast_regime_closed_form(const MediumParams& medium, double delta_p, double t,
                               const PulseSpec& pulse);

// fringe_scan per temperature with Doppler averaging applied.
std::vector<FringeScan> doppler_fringe_scan(const MediumParams& medium,
                                            const PulseSpec& pulse,
                                            std::span<const double> temperatures,
                                            std::span<const double> detunings,
                                            int workers = 0,
                                            const QuadratureControl& ctl = {});

// Fringe summary of a scan: i_min at resonance, first local maximum,
// contrast; i0plus is the scan value nearest the scan pulse's own delta_p.
FlashMetrics fringe_metrics(const FringeScan& scan);

// Strength of the interference oscillation: first interior local maximum at
// delta_p >= `from` minus the following local minimum. Returns 0 when the
// scan carries no oscillatory structure there (washed-out fringes). The
// resonance dip at delta_p = 0 is excluded on purpose: it survives any
// velocity average in copropagating geometry.
double fringe_oscillation_prominence(const FringeScan& scan, double from);

}  // namespace eitflash
