#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "eitflash/analysis.hpp"
#include "eitflash/errors.hpp"

using namespace eitflash;
using std::numbers::pi;

namespace {

MediumParams lambda_system(double b0, double omega_c = 0.5) {
  MediumParams m;
  m.b0 = b0;
  m.omega_c = omega_c;
  return m;
}

// synthetic trace with a prescribed complex amplitude law
FieldTrace synthetic_trace(const MediumParams& m, const PulseSpec& pulse, double t0,
                           double t1, std::size_t n,
                           const std::function<std::complex<double>(double)>& law) {
  FieldTrace tr;
  tr.t0 = t0;
  tr.dt = (t1 - t0) / double(n - 1);
  tr.pulse = pulse;
  tr.medium = m;
  tr.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.samples[i] = law(tr.time_at(i));
  return tr;
}

}  // namespace

TEST_CASE("flash_amplitude: paper's headline values") {
  const MediumParams m3 = lambda_system(200.0);
  const double dpi = delta_pi(m3);

  CHECK(flash_amplitude(m3, PulseSpec::make_step_off(dpi)) ==
        doctest::Approx(3.6).epsilon(0.06));  // superflash, paper: 3.5 +- 0.2
  CHECK(flash_amplitude(m3, PulseSpec::make_step_off(0.0)) < 0.01);  // anti-flash

  MediumParams m2 = m3.two_level_copy();
  CHECK(flash_amplitude(m2, PulseSpec::make_step_off(0.0)) == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS((void)flash_amplitude(m3, PulseSpec::make_step_on(0.0)), ValidationError);
}

TEST_CASE("fringe scans: range, symmetry, damping") {
  const MediumParams m = lambda_system(100.0);
  const double dpi = delta_pi(m);

  std::vector<double> grid;
  for (int i = -12; i <= 12; ++i) grid.push_back(dpi * double(i) / 8.0);
  const FringeScan scan = fringe_scan(m, PulseSpec::make_step_off(0.0), grid, 0);

  for (double v : scan.i0plus) {
    CHECK(v >= 0.0);
    CHECK(v <= 4.01);
  }
  // delta -> -delta symmetry at delta_c = 0
  const std::size_t n = scan.i0plus.size();
  for (std::size_t i = 0; i < n / 2; ++i)
    CHECK(scan.i0plus[i] == doctest::Approx(scan.i0plus[n - 1 - i]).epsilon(1e-6));

  // ground-state decoherence damps every fringe maximum
  std::vector<double> pos;
  for (int i = 1; i <= 24; ++i) pos.push_back(3.0 * dpi * double(i) / 24.0);
  const FringeScan crisp = fringe_scan(m, PulseSpec::make_step_off(0.0), pos, 0);
  MediumParams damped_m = m;
  damped_m.gamma31 = 1e-3;
  const FringeScan damped = fringe_scan(damped_m, PulseSpec::make_step_off(0.0), pos, 0);
  double crisp_max = 0.0, damped_max = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    crisp_max = std::max(crisp_max, crisp.i0plus[i]);
    damped_max = std::max(damped_max, damped.i0plus[i]);
  }
  CHECK(damped_max < crisp_max);

  CHECK_THROWS_WITH_AS((void)fringe_scan(m, PulseSpec::make_step_off(0.0),
                                         std::vector<double>{0.0}, 0),
                       "sweep counts >= 2", ValidationError);
}

TEST_CASE("first fringe maximum tracks delta_pi") {
  // the exact maximum of |H3 - 1|^2 sits slightly below delta_pi; the
  // residual-absorption pull scales like 1/b0 (0.9336 delta_pi at b0=100)
  const MediumParams m = lambda_system(100.0);
  const FringeMaximum fm = first_fringe_maximum(m, PulseSpec::make_step_off(0.0));
  CHECK(fm.delta_p / delta_pi(m) == doctest::Approx(0.9336).epsilon(0.01));
  CHECK(fm.value > 3.0);
}

TEST_CASE("fringe_map_vs_b0: 1/b0 narrowing") {
  const MediumParams m = lambda_system(100.0);
  std::vector<double> b0s = {100.0, 200.0};
  std::vector<double> grid;
  const double dpi100 = delta_pi(m);
  for (int i = 0; i <= 40; ++i) grid.push_back(2.0 * dpi100 * double(i) / 40.0);
  const auto rows = fringe_map_vs_b0(b0s, m, PulseSpec::make_step_off(0.0), grid, 0);
  REQUIRE(rows.size() == 2);
  // the b0=200 first maximum sits at roughly half the b0=100 detuning
  auto argmax_first = [&](const FringeScan& scan) {
    for (std::size_t i = 1; i + 1 < scan.i0plus.size(); ++i)
      if (scan.i0plus[i] > scan.i0plus[i - 1] && scan.i0plus[i] >= scan.i0plus[i + 1])
        return scan.detunings[i];
    return scan.detunings.back();
  };
  const double loc100 = argmax_first(rows[0]);
  const double loc200 = argmax_first(rows[1]);
  CHECK(loc200 == doctest::Approx(0.5 * loc100).epsilon(0.15));
  // consistency with a standalone scan
  const FringeScan alone = fringe_scan(m, PulseSpec::make_step_off(0.0), grid, 0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(rows[0].i0plus[i] == doctest::Approx(alone.i0plus[i]).epsilon(1e-12));
}

TEST_CASE("fit_flash_decay recovers a synthetic exponential") {
  const MediumParams m = lambda_system(200.0, 0.0);
  const PulseSpec off = PulseSpec::make_step_off(0.0);
  const double tau0 = 0.37;
  const FieldTrace tr = synthetic_trace(m, off, 0.01, 2.0, 200, [&](double t) {
    return std::complex<double>{std::exp(-0.5 * t / tau0), 0.0};
  });
  CHECK(fit_flash_decay(tr, 0.01, 2.0) == doctest::Approx(tau0).epsilon(1e-9));

  // rising intensity is rejected
  const FieldTrace rising = synthetic_trace(m, off, 0.01, 2.0, 50, [](double t) {
    return std::complex<double>{std::exp(0.2 * t), 0.0};
  });
  CHECK_THROWS_AS((void)fit_flash_decay(rising, 0.01, 2.0), FitError);

  // strongly curved log-intensity exceeds the residual threshold
  const FieldTrace curved = synthetic_trace(m, off, 0.01, 4.0, 100, [](double t) {
    return std::complex<double>{std::exp(-0.5 * (t + 2.0 * t * t)), 0.0};
  });
  CHECK_THROWS_AS((void)fit_flash_decay(curved, 0.01, 4.0, 0.05), FitError);
}

TEST_CASE("flash decay scaling across b0 (quadrature traces)") {
  std::vector<double> b0s = {50.0, 200.0};
  std::vector<double> taus;
  for (double b0 : b0s) {
    MediumParams m = lambda_system(b0, 0.0);
    const double tau_f = flash_time_scale(m);
    const PulseSpec off = PulseSpec::make_step_off(0.0);
    const FieldTrace tr = quadrature_trace(off, m, tau_f / 10.0, 3.0 * tau_f, 48);
    taus.push_back(fit_flash_decay(tr, tau_f / 10.0, 3.0 * tau_f));
  }
  const double slope = std::log(taus[1] / taus[0]) / std::log(b0s[1] / b0s[0]);
  CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));
  CHECK(taus[1] == doctest::Approx(2.0 / 200.0).epsilon(0.6));  // O(1/(b0 gamma21))
}

TEST_CASE("group delay estimators on a synthetic erf rise") {
  // amplitude = Phi((t - tau_d)/sigma): threshold crossing of the intensity
  // sits at +0.823 sigma, the dI/dt centroid at +0.564 sigma
  const double tau_d = 400.0, sigma = 60.0;
  MediumParams m = lambda_system(100.0);  // steady_state(0) = 1
  const PulseSpec sq = PulseSpec::make_square(0.0, 2000.0, 2000.0);  // ignition at 0
  const FieldTrace tr = synthetic_trace(m, sq, 0.0, 1200.0, 4000, [&](double t) {
    return std::complex<double>{0.5 * (1.0 + std::erf((t - tau_d) / (sigma * std::sqrt(2.0)))),
                                0.0};
  });
  const double thresh = measure_group_delay(tr, DelayEstimator::threshold_crossing);
  CHECK(thresh == doctest::Approx(tau_d + 0.8228 * sigma).epsilon(0.02));
  const double centroid = measure_group_delay(tr, DelayEstimator::derivative_centroid);
  CHECK(centroid == doctest::Approx(tau_d + 0.5642 * sigma).epsilon(0.03));
  // the amplitude midpoint is unbiased for the symmetric window
  const double midpoint = measure_group_delay(tr, DelayEstimator::amplitude_midpoint);
  CHECK(midpoint == doctest::Approx(tau_d).epsilon(0.01));
}

TEST_CASE("group delay requires transmission") {
  MediumParams opaque = lambda_system(200.0, 0.0);
  const PulseSpec sq = PulseSpec::make_square(0.0, 100.0);
  const FieldTrace tr = synthetic_trace(opaque, sq, -100.0, 0.0, 100,
                                        [](double) { return std::complex<double>{0.0, 0.0}; });
  CHECK_THROWS_AS((void)measure_group_delay(tr), ThresholdNotReached);
}

TEST_CASE("modulation map and contrast curve") {
  const MediumParams m = lambda_system(50.0);
  const double dpi = delta_pi(m);
  std::vector<double> periods = {1e-3, 1.0, 3000.0};
  std::vector<double> detunings = {0.0, 0.4 * dpi, 0.8 * dpi, 1.0 * dpi, 1.2 * dpi, 1.6 * dpi};
  const ModulationMap map = modulation_map(m, periods, detunings, 0);
  REQUIRE(map.values.size() == periods.size() * detunings.size());
  for (double v : map.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 4.01);
  }
  const auto contrast = contrast_curve(map);
  REQUIRE(contrast.size() == periods.size());
  for (const auto& cp : contrast) {
    CHECK(cp.i_max > cp.i_min);
    CHECK(cp.contrast > 0.0);
    CHECK(cp.contrast <= 1.0);
  }
  // slow-regime resonance minimum is an anti-flash dip
  CHECK(contrast.back().i_min < 0.01);

  // a grid without delta_p = 0 is rejected
  ModulationMap bad = map;
  bad.detunings.erase(bad.detunings.begin());
  bad.values.resize(bad.periods.size() * bad.detunings.size());
  CHECK_THROWS_AS((void)contrast_curve(bad), ValidationError);
}

TEST_CASE("fast-regime closed form") {
  const MediumParams m = lambda_system(200.0);
  const double dpi = delta_pi(m);
  const PulseSpec fast = PulseSpec::make_periodic(dpi, 1e-3);

  CHECK(fast_regime_closed_form(m, 0.0, -2.4e-4, fast) == doctest::Approx(1.0));
  CHECK(fast_regime_closed_form(m, 0.0, 2.4e-4, fast) == doctest::Approx(0.0));
  // delta_pi: flipped pulse, |1 + (e^{i pi}-1)/2|^2 = 0 on, 1 off
  CHECK(fast_regime_closed_form(m, dpi, -2.4e-4, fast) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fast_regime_closed_form(m, dpi, 2.4e-4, fast) == doctest::Approx(1.0).epsilon(1e-12));

  const PulseSpec slow = PulseSpec::make_periodic(dpi, 1.0);
  CHECK_THROWS_AS((void)fast_regime_closed_form(m, dpi, 0.0, slow), ValidationError);

  // oracle comparison in the fast regime (5% in amplitude)
  for (double t : {-2.5e-4, 2.5e-4}) {
    const double exact = std::norm(transmit_periodic_sample(fast, m, t));
    const double closed = fast_regime_closed_form(m, dpi, t, fast);
    CHECK(std::abs(std::sqrt(exact) - std::sqrt(closed)) < 0.05);
  }
}

TEST_CASE("doppler fringe scan: washout of the oscillation at 50 K (coarse)") {
  MediumParams m = medium_preset("rubidium-d2");
  m.b0 = 200.0;
  m.omega_c = 0.5;
  m.doppler_mode = DopplerMode::copropagating;
  const double dpi = delta_pi(m);
  std::vector<double> temps = {0.0, 50.0};
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(3.0 * dpi * double(i) / 30.0);
  const auto scans = doppler_fringe_scan(m, PulseSpec::make_step_off(0.0), temps, grid, 0);
  REQUIRE(scans.size() == 2);
  const double cold = fringe_oscillation_prominence(scans[0], 0.7 * dpi);
  const double hot = fringe_oscillation_prominence(scans[1], 0.7 * dpi);
  CHECK(cold > 3.0);  // crisp fringes at T = 0
  CHECK(hot < 0.1 * cold);

  MediumParams off_mode = m;
  off_mode.doppler_mode = DopplerMode::off;
  CHECK_THROWS_AS(
      (void)doppler_fringe_scan(off_mode, PulseSpec::make_step_off(0.0), temps, grid, 0),
      ValidationError);
}
