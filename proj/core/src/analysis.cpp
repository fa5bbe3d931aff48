#include "eitflash/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "eitflash/errors.hpp"
#include "eitflash/sweep.hpp"

namespace eitflash {

namespace {

double pulse_ignition(const PulseSpec& p) {
  switch (p.kind) {
    case PulseKind::step_on:
      return p.switch_time;
    case PulseKind::square:
      return p.switch_time - p.duration;
    case PulseKind::periodic_square:
      return p.switch_time - 0.5 * p.period;
    case PulseKind::step_off:
      return -std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

double zero_plus_time(const MediumParams& medium, const PulseSpec& pulse) {
  return pulse.switch_time + flash_time_scale(medium) / 100.0;
}

}  // namespace

double flash_amplitude(const MediumParams& medium, const PulseSpec& pulse,
                       const QuadratureControl& ctl) {
  if (!pulse.has_falling_edge()) throw ValidationError("pulse has no falling edge");
  const double t = zero_plus_time(medium, pulse);
  const std::complex<double> e = transmit_sample(pulse, medium, t, ctl);
  return std::norm(e);
}

FringeScan fringe_scan(const MediumParams& medium, const PulseSpec& pulse,
                       std::span<const double> detunings, int workers,
                       const QuadratureControl& ctl) {
  medium.validate();
  if (detunings.size() < 2) throw ValidationError("sweep counts >= 2");
  for (std::size_t i = 0; i + 1 < detunings.size(); ++i)
    if (!(detunings[i] < detunings[i + 1]))
      throw ValidationError("detunings strictly increasing");
  FringeScan scan;
  scan.detunings.assign(detunings.begin(), detunings.end());
  scan.i0plus.resize(detunings.size());
  scan.medium = medium;
  scan.pulse = pulse;
  parallel_for(detunings.size(), workers, [&](std::size_t i) {
    PulseSpec p = pulse;
    p.delta_p = detunings[i];
    scan.i0plus[i] = flash_amplitude(medium, p, ctl);
  });
  return scan;
}

std::vector<FringeScan> fringe_map_vs_b0(std::span<const double> b0_grid,
                                         const MediumParams& medium, const PulseSpec& pulse,
                                         std::span<const double> detunings, int workers,
                                         const QuadratureControl& ctl) {
  std::vector<FringeScan> rows;
  rows.reserve(b0_grid.size());
  for (double b0 : b0_grid) {
    MediumParams m = medium;
    m.b0 = b0;
    rows.push_back(fringe_scan(m, pulse, detunings, workers, ctl));
  }
  return rows;
}

FringeMaximum first_fringe_maximum(const MediumParams& medium, const PulseSpec& pulse,
                                   const QuadratureControl& ctl, int workers) {
  const double dpi = delta_pi(medium);
  const double step = dpi / 20.0;
  auto value_at = [&](double delta) {
    PulseSpec p = pulse;
    p.delta_p = delta;
    return flash_amplitude(medium, p, ctl);
  };

  // coarse scan out to 3 delta_pi, computed in parallel
  const std::size_t n_coarse = 60;
  std::vector<double> coarse(n_coarse + 1);
  parallel_for(n_coarse + 1, workers,
               [&](std::size_t k) { coarse[k] = value_at(step * double(k)); });
  std::size_t peak = 0;
  for (std::size_t k = 1; k < n_coarse; ++k) {
    if (coarse[k] > coarse[k - 1] && coarse[k] >= coarse[k + 1]) {
      peak = k;
      break;
    }
  }
  if (peak == 0) throw NumericalError("no fringe maximum found within 3*delta_pi");

  // golden-section refinement on the bracketing interval
  double a = step * double(peak - 1);
  double b = step * double(peak + 1);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = value_at(x1);
  double f2 = value_at(x2);
  for (int iter = 0; iter < 40 && (b - a) > 1e-5 * dpi; ++iter) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = value_at(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = value_at(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, value_at(x)};
}

FieldTrace quadrature_trace(const PulseSpec& pulse, const MediumParams& medium,
                            double t_begin, double t_end, std::size_t n_samples,
                            int workers, const QuadratureControl& ctl) {
  if (n_samples < 2) throw ValidationError("n_samples >= 2");
  if (!(t_end > t_begin)) throw ValidationError("time window end > begin");
  FieldTrace trace;
  trace.t0 = t_begin;
  trace.dt = (t_end - t_begin) / double(n_samples - 1);
  trace.pulse = pulse;
  trace.medium = medium;
  trace.samples.resize(n_samples);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    trace.samples[i] = transmit_sample(pulse, medium, trace.time_at(i), ctl);
  });
  return trace;
}

double fit_flash_decay(const FieldTrace& trace, double t_start, double t_end,
                       double max_rms_residual) {
  if (!(t_end > t_start)) throw ValidationError("fit window end > begin");
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.time_at(i);
    if (t < t_start || t > t_end) continue;
    const double intensity = trace.intensity_at(i);
    if (!(intensity > 0.0)) throw FitError("non-positive intensity inside fit window");
    ts.push_back(t);
    ys.push_back(std::log(intensity));
  }
  if (ts.size() < 4) throw FitError("fewer than 4 samples inside fit window");
  const double n = double(ts.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  const double denom = n * stt - st * st;
  if (!(std::abs(denom) > 0.0)) throw FitError("degenerate fit window");
  const double slope = (n * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss += r * r;
  }
  const double rms = std::sqrt(ss / n);
  if (!(slope < 0.0)) throw FitError("flash decay fit: non-negative slope");
  if (rms > max_rms_residual)
    throw FitError("flash decay fit: rms residual " + std::to_string(rms) + " above threshold");
  return -1.0 / slope;
}

double measure_group_delay(const FieldTrace& trace, DelayEstimator estimator) {
  const MediumParams& medium = trace.medium;
  const PulseSpec& pulse = trace.pulse;
  if (pulse.kind != PulseKind::step_on && pulse.kind != PulseKind::square)
    throw ValidationError("group delay measurement requires a step-on or square trace");
  const double ignition = pulse_ignition(pulse);
  const double i_steady = std::norm(steady_state(medium, pulse.delta_p));
  if (i_steady < 0.1)
    throw ThresholdNotReached("steady transmission < 0.1; no slow-light rise to measure");
  const double skip_until = ignition + 20.0 * flash_time_scale(medium);
  const double cutoff =
      pulse.kind == PulseKind::square ? pulse.switch_time : trace.end_time();

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.time_at(i);
    if (t >= skip_until && t <= cutoff) idx.push_back(i);
  }
  if (idx.size() < 4) throw ValidationError("trace does not cover the slow-light rise");

  if (estimator == DelayEstimator::threshold_crossing ||
      estimator == DelayEstimator::amplitude_midpoint) {
    const bool on_amplitude = estimator == DelayEstimator::amplitude_midpoint;
    auto level = [&](std::size_t i) {
      return on_amplitude ? std::abs(trace.samples[i]) : trace.intensity_at(i);
    };
    const double target = on_amplitude ? 0.5 * std::sqrt(i_steady)
                                       : (1.0 - std::exp(-1.0)) * i_steady;
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const double prev = level(idx[k - 1]);
      const double cur = level(idx[k]);
      if (prev < target && cur >= target) {
        const double t_prev = trace.time_at(idx[k - 1]);
        const double t_cur = trace.time_at(idx[k]);
        const double frac = (target - prev) / (cur - prev);
        return t_prev + frac * (t_cur - t_prev) - ignition;
      }
    }
    throw ThresholdNotReached("transmission never reaches the rise threshold");
  }

  // derivative centroid: sum t dI over the rise, stopping once the
  // transmission has essentially settled
  double w_sum = 0.0, tw_sum = 0.0;
  for (std::size_t k = 1; k < idx.size(); ++k) {
    const double di = trace.intensity_at(idx[k]) - trace.intensity_at(idx[k - 1]);
    const double t_mid = 0.5 * (trace.time_at(idx[k]) + trace.time_at(idx[k - 1]));
    w_sum += di;
    tw_sum += t_mid * di;
    if (trace.intensity_at(idx[k]) >= 0.98 * i_steady) break;
  }
  if (!(w_sum > 0.0)) throw ThresholdNotReached("no rising transmission found");
  return tw_sum / w_sum - ignition;
}

ModulationMap modulation_map(const MediumParams& medium, std::span<const double> periods,
                             std::span<const double> detunings, int workers,
                             const QuadratureControl& ctl) {
  medium.validate();
  if (periods.size() < 2 || detunings.size() < 2) throw ValidationError("sweep counts >= 2");
  for (double T : periods)
    if (!(T > 0.0)) throw ValidationError("period > 0");
  ModulationMap map;
  map.periods.assign(periods.begin(), periods.end());
  map.detunings.assign(detunings.begin(), detunings.end());
  map.values.resize(periods.size() * detunings.size());
  parallel_for(map.values.size(), workers, [&](std::size_t flat) {
    const std::size_t pi_idx = flat / detunings.size();
    const std::size_t d_idx = flat % detunings.size();
    const PulseSpec pulse = PulseSpec::make_periodic(detunings[d_idx], periods[pi_idx]);
    map.values[flat] = flash_amplitude(medium, pulse, ctl);
  });
  return map;
}

std::vector<ContrastPoint> contrast_curve(const ModulationMap& map) {
  const auto& d = map.detunings;
  std::size_t zero_idx = d.size();
  for (std::size_t j = 0; j < d.size(); ++j)
    if (std::abs(d[j]) < 1e-12) zero_idx = j;
  if (zero_idx == d.size())
    throw ValidationError("contrast curve requires delta_p = 0 in the detuning grid");
  std::vector<ContrastPoint> out;
  out.reserve(map.periods.size());
  for (std::size_t r = 0; r < map.periods.size(); ++r) {
    ContrastPoint cp;
    cp.period = map.periods[r];
    cp.i_min = map.at(r, zero_idx);
    bool found = false;
    for (std::size_t j = zero_idx + 1; j + 1 < d.size(); ++j) {
      const double v = map.at(r, j);
      if (v > map.at(r, j - 1) && v >= map.at(r, j + 1)) {
        cp.i_max = v;
        cp.delta_at_max = d[j];
        found = true;
        break;
      }
    }
    if (!found) throw NumericalError("no fringe maximum found in modulation map row");
    cp.contrast = (cp.i_max - cp.i_min) / (cp.i_max + cp.i_min);
    out.push_back(cp);
  }
  return out;
}

double fast_regime_closed_form(const MediumParams& medium, double delta_p, double t,
                               const PulseSpec& pulse) {
  if (pulse.kind != PulseKind::periodic_square)
    throw ValidationError("fast-regime closed form requires a periodic_square pulse");
  if (!(pulse.period <= 0.5 * flash_time_scale(medium)))
    throw ValidationError("fast-regime closed form valid for T << tau_f only");
  const double phi = delta_p * group_delay(medium);
  const std::complex<double> carrier =
      0.5 * (std::exp(std::complex<double>(0.0, phi)) - 1.0);
  return std::norm(pulse.envelope(t) + carrier);
}

std::vector<FringeScan> doppler_fringe_scan(const MediumParams& medium,
                                            const PulseSpec& pulse,
                                            std::span<const double> temperatures,
                                            std::span<const double> detunings, int workers,
                                            const QuadratureControl& ctl) {
  for (double T : temperatures)
    if (T > 0.0 && medium.doppler_mode == DopplerMode::off)
      throw ValidationError("doppler_mode must not be 'off' for a temperature scan");
  std::vector<FringeScan> out;
  out.reserve(temperatures.size());
  for (double T : temperatures) {
    MediumParams m = medium;
    m.temperature = T;
    out.push_back(fringe_scan(m, pulse, detunings, workers, ctl));
  }
  return out;
}

double fringe_oscillation_prominence(const FringeScan& scan, double from) {
  const auto& d = scan.detunings;
  const auto& v = scan.i0plus;
  std::size_t peak = 0;
  for (std::size_t j = 1; j + 1 < d.size(); ++j) {
    if (d[j] < from) continue;
    if (v[j] > v[j - 1] && v[j] >= v[j + 1]) {
      peak = j;
      break;
    }
  }
  if (peak == 0) return 0.0;
  double trough = v[peak];
  for (std::size_t j = peak + 1; j < d.size(); ++j) {
    trough = std::min(trough, v[j]);
    if (j + 1 < d.size() && v[j] < v[j + 1]) break;  // passed the minimum
  }
  return v[peak] - trough;
}

FlashMetrics fringe_metrics(const FringeScan& scan) {
  FlashMetrics metrics;
  const auto& d = scan.detunings;
  const auto& v = scan.i0plus;
  std::size_t zero_idx = 0;
  double best = std::numeric_limits<double>::max();
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (std::abs(d[j]) < best) {
      best = std::abs(d[j]);
      zero_idx = j;
    }
  }
  metrics.i_min = v[zero_idx];
  bool found = false;
  for (std::size_t j = zero_idx + 1; j + 1 < d.size(); ++j) {
    if (v[j] > v[j - 1] && v[j] >= v[j + 1]) {
      metrics.i_max = v[j];
      found = true;
      break;
    }
  }
  if (!found) metrics.i_max = *std::max_element(v.begin(), v.end());
  metrics.contrast = (metrics.i_max + metrics.i_min) > 0.0
                         ? (metrics.i_max - metrics.i_min) / (metrics.i_max + metrics.i_min)
                         : 0.0;
  std::size_t own = 0;
  best = std::numeric_limits<double>::max();
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (std::abs(d[j] - scan.pulse.delta_p) < best) {
      best = std::abs(d[j] - scan.pulse.delta_p);
      own = j;
    }
  }
  metrics.i0plus = v[own];
  metrics.tau_f_fit = std::numeric_limits<double>::quiet_NaN();
  return metrics;
}

}  // namespace eitflash
