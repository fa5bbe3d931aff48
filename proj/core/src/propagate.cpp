#include "eitflash/propagate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>

#include "eitflash/errors.hpp"
#include "eitflash/quadrature.hpp"
#include "eitflash/sweep.hpp"

namespace eitflash {

namespace {

constexpr std::complex<double> I{0.0, 1.0};
constexpr double pi = std::numbers::pi;

double trace_pre_margin(const MediumParams& m) { return 25.0 / m.gamma21; }

// Distance of the susceptibility poles from the real axis: the slowest
// free-decay rate of the medium response.
double min_pole_rate(const MediumParams& m) {
  if (!m.three_level()) return 0.5 * m.gamma21;
  // roots of (d + i g21/2)(d - dc + i g31/2) - wc^2/4 = 0
  const std::complex<double> b = I * (0.5 * (m.gamma21 + m.gamma31)) - m.delta_c;
  const std::complex<double> c =
      (I * (0.5 * m.gamma21)) * (-m.delta_c + I * (0.5 * m.gamma31)) -
      0.25 * m.omega_c * m.omega_c;
  const std::complex<double> disc = std::sqrt(b * b - 4.0 * c);
  const double r1 = -(0.5 * (-b + disc)).imag();
  const double r2 = -(0.5 * (-b - disc)).imag();
  return std::max(std::min(r1, r2), 1e-300);
}

// Gaussian-like time width of the EIT transparency window transient.
double eit_sigma_t(const MediumParams& m) {
  const double wc2 = m.omega_c * m.omega_c;
  return 2.0 * std::sqrt(m.b0) * m.gamma21 / wc2;
}

double extinction_time(const PulseSpec& p) { return p.switch_time; }

double ignition_time(const PulseSpec& p) {
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

}  // namespace

double steady_settle_time(const MediumParams& m) {
  double t = std::max(40.0 / m.gamma21, 40.0 / min_pole_rate(m));
  if (m.three_level()) t = std::max(t, group_delay(m) + 12.0 * eit_sigma_t(m));
  return t;
}

// ---------------------------------------------------------------------------
// rational tail correction
//
// zeta is an exact rational function of the detuning (at most two simple
// poles per velocity class), so its slowly decaying 1/W spectral tail can be
// removed from the numeric transform/series and restored in closed form:
// the step response of coeff/(W - p)^k is a causal exponential-polynomial
// kernel. Transform and series backends subtract q = -zeta (+ zeta^2/2 for
// greater reach when no velocity average is active) from H - 1 on the grid
// and add the analytic response of q back in the time domain.
// ---------------------------------------------------------------------------

namespace {

struct PoleKernelTerm {
  std::complex<double> p;     // pole position relative to the carrier
  int k = 1;                  // pole order
  std::complex<double> coeff; // q ~ coeff / (W - p)^k
};

// zeta partial fractions for one velocity class; appends coeff-scaled terms
// of weight * zeta and, when second_order, of weight * (-zeta^2/2) as part
// of q = -zeta + zeta^2/2 (so the sign of the zeta terms is flipped by the
// caller). Returns the pair (poles, residues/double coefficients).
struct ZetaPoles {
  bool degenerate = false;
  std::complex<double> p1, r1;  // simple poles and residues
  std::complex<double> p2, r2;
  std::complex<double> pd, rd, ad;  // degenerate: rd/(x) + ad/x^2 at pd
};

ZetaPoles zeta_pole_decomposition(const MediumParams& m, double kv, double delta_p) {
  const double g = m.gamma21;
  const std::complex<double> strength = I * (0.25 * m.b0 * g);
  ZetaPoles out;
  if (!m.three_level()) {
    out.degenerate = true;
    out.pd = kv - I * (0.5 * g) - delta_p;
    out.rd = strength;
    out.ad = 0.0;
    return out;
  }
  const double s2 = (m.doppler_mode == DopplerMode::simple_shift) ? kv : 0.0;
  const std::complex<double> u = -kv + I * (0.5 * g);                    // one-photon
  const std::complex<double> v = -m.delta_c - s2 + I * (0.5 * m.gamma31);  // two-photon
  const std::complex<double> disc = std::sqrt((u - v) * (u - v) + m.omega_c * m.omega_c);
  const std::complex<double> pa = 0.5 * (-(u + v) + disc);
  const std::complex<double> pb = 0.5 * (-(u + v) - disc);
  const double scale = std::max({g, m.omega_c, std::abs(m.delta_c), std::abs(kv), 1.0});
  if (std::abs(pa - pb) < 1e-9 * scale) {
    out.degenerate = true;
    const std::complex<double> p = 0.5 * (-(u + v));
    out.pd = p - delta_p;
    out.ad = strength * (p + v);
    out.rd = strength;
    return out;
  }
  out.p1 = pa - delta_p;
  out.p2 = pb - delta_p;
  out.r1 = strength * (pa + v) / (pa - pb);
  out.r2 = strength * (pb + v) / (pb - pa);
  return out;
}

// q = -zeta [+ zeta^2/2]; weight multiplies zeta (velocity average). The
// second-order terms are only built for a single velocity class (weight 1),
// where (zeta_avg)^2 has no cross-class products.
void append_q_terms(std::vector<PoleKernelTerm>& terms, const ZetaPoles& z, double weight,
                    bool second_order) {
  if (z.degenerate) {
    terms.push_back({z.pd, 1, -weight * z.rd});
    if (std::abs(z.ad) > 0.0) terms.push_back({z.pd, 2, -weight * z.ad});
    if (second_order) {
      terms.push_back({z.pd, 2, 0.5 * z.rd * z.rd});
      if (std::abs(z.ad) > 0.0) {
        terms.push_back({z.pd, 3, z.rd * z.ad});
        terms.push_back({z.pd, 4, 0.5 * z.ad * z.ad});
      }
    }
    return;
  }
  terms.push_back({z.p1, 1, -weight * z.r1});
  terms.push_back({z.p2, 1, -weight * z.r2});
  if (second_order) {
    const std::complex<double> cross = z.r1 * z.r2;
    terms.push_back({z.p1, 1, cross / (z.p1 - z.p2)});
    terms.push_back({z.p2, 1, cross / (z.p2 - z.p1)});
    terms.push_back({z.p1, 2, 0.5 * z.r1 * z.r1});
    terms.push_back({z.p2, 2, 0.5 * z.r2 * z.r2});
  }
}

struct TailCorrection {
  std::vector<PoleKernelTerm> terms;
  bool second_order = false;

  // q evaluated directly (subtracted from H - 1 on the grid).
  std::complex<double> q(std::complex<double> w) const {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& t : terms) {
      std::complex<double> den = w - t.p;
      std::complex<double> pw = den;
      for (int j = 1; j < t.k; ++j) pw *= den;
      acc += t.coeff / pw;
    }
    return acc;
  }

  // Causal step-on response of q at time tau:
  //   u(tau) [ (-1)^k/p^k + e^{-ip tau} sum_{j=1..k} (-1)^{k-j} (-i tau)^{j-1}
  //            / (p^{k-j+1} (j-1)!) ]  per term.
  std::complex<double> step_on(double tau) const {
    if (tau <= 0.0) return {0.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (const auto& t : terms) {
      const std::complex<double> decay = std::exp(-I * t.p * tau);
      std::complex<double> p_k{1.0, 0.0};
      for (int j = 0; j < t.k; ++j) p_k *= t.p;
      const double sign_k = (t.k % 2 == 0) ? 1.0 : -1.0;
      std::complex<double> sum = sign_k / p_k;
      std::complex<double> tau_pow{1.0, 0.0};  // (-i tau)^{j-1} / (j-1)!
      std::complex<double> p_down = p_k;       // p^{k-j+1}
      double sign_j = -sign_k;                 // (-1)^{k-j}
      for (int j = 1; j <= t.k; ++j) {
        sum += decay * sign_j * tau_pow / p_down;
        sign_j = -sign_j;
        tau_pow *= -I * tau / double(j);
        p_down /= t.p;
      }
      acc += t.coeff * sum;
    }
    return acc;
  }

  // Response to the single square on (t_off - d, t_off), tau = t - t_off.
  std::complex<double> square(double tau, double duration) const {
    return step_on(tau + duration) - step_on(tau);
  }
};

TailCorrection make_tail_correction(const ResponseModel& model, double delta_p) {
  const MediumParams& m = model.params();
  TailCorrection out;
  out.second_order = !m.doppler_active();
  if (!m.doppler_active()) {
    append_q_terms(out.terms, zeta_pole_decomposition(m, 0.0, delta_p), 1.0, true);
    return out;
  }
  const HermiteRule& rule = hermite_rule(model.hermite_order());
  const double sigma = doppler_sigma(m);
  const double scale = std::numbers::sqrt2 * sigma;
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double w = inv_sqrt_pi * rule.weights[i];
    append_q_terms(out.terms, zeta_pole_decomposition(m, scale * rule.nodes[i], delta_p), w,
                   false);
  }
  return out;
}

}  // namespace

std::complex<double> steady_state(const MediumParams& medium, double delta_p) {
  return ResponseModel(medium).transmission(delta_p);
}

// ---------------------------------------------------------------------------
// SpectralGrid
// ---------------------------------------------------------------------------

SpectralGrid SpectralGrid::recommend(const MediumParams& medium, const PulseSpec& pulse) {
  medium.validate();
  pulse.validate();
  const double g = medium.gamma21;
  const double span =
      std::max(8.0 * medium.b0 * g,
               32.0 * g + 8.0 * (medium.omega_c + std::abs(medium.delta_c) +
                                 std::abs(pulse.delta_p)));
  const double duration = pulse.kind == PulseKind::square       ? pulse.duration
                          : pulse.kind == PulseKind::periodic_square ? 2.0 * pulse.period
                                                                     : 0.0;
  const double needed_window =
      trace_pre_margin(medium) + duration + steady_settle_time(medium);
  double res = 2.0 * pi / needed_window;
  if (medium.three_level()) {
    res = std::min(res, delta_pi(medium) / 20.0);
    res = std::min(res, 2.0 * pi / (8.0 * group_delay(medium)));
    if (medium.gamma31 > 0.0) res = std::min(res, medium.gamma31);
  }
  const double n_for_res = 2.0 * span / res;
  const double n_for_window = needed_window * span / pi;
  const auto n_req = std::max({n_for_res, n_for_window, 16.0});
  SpectralGrid grid;
  grid.span = span;
  grid.n_points = std::bit_ceil(std::size_t(std::ceil(n_req)));
  return grid;
}

void SpectralGrid::validate(const MediumParams& medium, const PulseSpec& pulse) const {
  medium.validate();
  pulse.validate();
  if (!(span > 0.0)) throw GridError("grid span > 0 required");
  if (n_points < 16 || !std::has_single_bit(n_points))
    throw GridError("grid n_points must be a power of two >= 16");
  const double g = medium.gamma21;
  if (span < 8.0 * medium.b0 * g)
    throw GridError("grid too coarse: span >= 8*b0*gamma21 required to cover the flash bandwidth");
  const double res = resolution();
  if (medium.three_level()) {
    if (res > delta_pi(medium) / 20.0)
      throw GridError("grid too coarse: resolution <= delta_pi/20 required");
    if (res > 2.0 * pi / (8.0 * group_delay(medium)))
      throw GridError("grid too coarse: resolution <= 2*pi/(8*tau_EIT) required");
    if (medium.gamma31 > 0.0 && res > medium.gamma31)
      throw GridError("grid too coarse: resolution <= gamma31 required");
  }
  if (pulse.kind == PulseKind::square) {
    const double needed =
        trace_pre_margin(medium) + pulse.duration + steady_settle_time(medium);
    if (window() < needed)
      throw GridError("grid too coarse: periodization window shorter than pulse + settling margins");
  }
}

TimeWindow default_time_window(const MediumParams& medium, const PulseSpec& pulse) {
  const double settle = steady_settle_time(medium);
  switch (pulse.kind) {
    case PulseKind::square:
      return {ignition_time(pulse) - 10.0 / medium.gamma21, extinction_time(pulse) + settle};
    case PulseKind::periodic_square:
      return {pulse.switch_time - 2.0 * pulse.period, pulse.switch_time + 2.0 * pulse.period};
    default:
      return {pulse.switch_time - 10.0 / medium.gamma21, pulse.switch_time + settle};
  }
}

std::size_t FieldTrace::index_of(double t) const {
  if (samples.empty()) throw ValidationError("empty trace");
  const double x = (t - t0) / dt;
  if (x < -0.5 || x > double(samples.size() - 1) + 0.5)
    throw ValidationError("time outside trace window");
  const auto i = std::llround(x);
  return std::size_t(std::clamp<long long>(i, 0, (long long)samples.size() - 1));
}

// ---------------------------------------------------------------------------
// transform backend
// ---------------------------------------------------------------------------

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

void fft_forward_in_place(std::vector<std::complex<double>>& buf) {
  fftw_plan plan;
  {
    std::scoped_lock lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(int(buf.size()), reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                            FFTW_ESTIMATE);
  }
  if (!plan) throw NumericalError("fftw plan creation failed");
  fftw_execute(plan);
  {
    std::scoped_lock lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

namespace {

FieldTrace fft_trace_core(const std::function<std::complex<double>(double)>& spectrum,
                          const std::function<std::complex<double>(double)>& filter,
                          const std::function<std::complex<double>(double)>& time_domain_add,
                          const PulseSpec& pulse, const MediumParams& medium,
                          const SpectralGrid& grid, const TimeWindow& window,
                          std::size_t stride, int workers) {
  grid.validate(medium, pulse);
  if (stride == 0) throw ValidationError("stride >= 1");
  if (!(window.end > window.begin)) throw ValidationError("time window end > begin");

  const std::size_t n = grid.n_points;
  const double dw = grid.resolution();
  const double dt = grid.dt();
  const double settle = steady_settle_time(medium);
  const double t0g = std::min(ignition_time(pulse) - trace_pre_margin(medium), window.begin);
  const double t_end_needed = std::max(window.end, extinction_time(pulse) + settle);
  if (t0g + grid.window() < t_end_needed)
    throw GridError("grid too coarse: periodization window does not reach the requested end time");

  std::vector<std::complex<double>> buf(n);
  parallel_chunks(n, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const double w = (double(j) - double(n / 2)) * dw;
      buf[j] = spectrum(w) * filter(w) * std::exp(std::complex<double>(0.0, -w * t0g));
    }
  });
  fft_forward_in_place(buf);

  const double scale = dw / (2.0 * pi);
  double edge = 0.0;
  const std::size_t n_edge = std::min<std::size_t>(32, n / 2);
  for (std::size_t k = 0; k < n_edge; ++k) {
    edge = std::max(edge, scale * std::abs(buf[k]));
    edge = std::max(edge, scale * std::abs(buf[n - 1 - k]));
  }

  long long k0 = (long long)std::ceil((window.begin - t0g) / dt - 1e-9);
  long long k1 = (long long)std::floor((window.end - t0g) / dt + 1e-9);
  k0 = std::clamp<long long>(k0, 0, (long long)n - 1);
  k1 = std::clamp<long long>(k1, 0, (long long)n - 1);
  if (k1 < k0) throw ValidationError("time window contains no grid samples");

  FieldTrace trace;
  trace.t0 = t0g + double(k0) * dt;
  trace.dt = dt * double(stride);
  trace.pulse = pulse;
  trace.medium = medium;
  trace.grid = grid;
  trace.edge_residual = edge;
  trace.samples.reserve(std::size_t((k1 - k0) / (long long)stride) + 1);
  for (long long k = k0; k <= k1; k += (long long)stride) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double tk = t0g + double(k) * dt;
    trace.samples.push_back(scale * sign * buf[std::size_t(k)] + time_domain_add(tk));
  }
  return trace;
}

}  // namespace

FieldTrace transmit_spectrum(const std::function<std::complex<double>(double)>& spectrum,
                             const std::function<std::complex<double>(double)>& incident,
                             const PulseSpec& pulse, const MediumParams& medium,
                             const SpectralGrid& grid, const TimeWindow& window,
                             std::size_t stride, int workers) {
  const ResponseModel model(medium);
  const double dp = pulse.delta_p;
  return fft_trace_core(
      spectrum, [&model, dp](double w) { return model.transmission(dp + w) - 1.0; },
      incident, pulse, medium, grid, window, stride, workers);
}

FieldTrace transmit_trace(const PulseSpec& pulse, const MediumParams& medium,
                          const SpectralGrid& grid, const TimeWindow& window,
                          std::size_t stride, int workers) {
  medium.validate();
  pulse.validate();
  if (pulse.kind == PulseKind::periodic_square) {
    const double dt = grid.dt() * double(std::max<std::size_t>(stride, 1));
    const std::size_t count =
        std::max<std::size_t>(2, std::size_t((window.end - window.begin) / dt) + 1);
    return transmit_periodic(pulse, medium, window, count);
  }
  if (pulse.kind != PulseKind::square)
    throw ValidationError("transmit_trace handles square/periodic_square; use transmit_sample for steps");
  const ResponseModel model(medium);
  const double dp = pulse.delta_p;
  const TailCorrection corr = make_tail_correction(model, dp);
  auto spectrum = [pulse](double w) { return square_spectrum(pulse, w); };
  auto filter = [&model, &corr, dp](double w) {
    return model.transmission(dp + w) - 1.0 - corr.q(w);
  };
  auto add = [&corr, pulse](double t) {
    return incident_amplitude(pulse, t) +
           corr.square(t - pulse.switch_time, pulse.duration);
  };
  return fft_trace_core(spectrum, filter, add, pulse, medium, grid, window, stride, workers);
}

FieldTrace transmit_trace(const PulseSpec& pulse, const MediumParams& medium,
                          std::size_t stride, int workers) {
  return transmit_trace(pulse, medium, SpectralGrid::recommend(medium, pulse),
                        default_time_window(medium, pulse), stride, workers);
}

// ---------------------------------------------------------------------------
// quadrature backend
// ---------------------------------------------------------------------------

namespace {

// Radius beyond which the response is analytic in the full half-planes and
// |zeta| is small; handoff from the real-axis core to the descent contours.
double handoff_radius(const MediumParams& m, double delta_p, const ResponseModel& model) {
  const double g = m.gamma21;
  return std::max({8.0 * (g + m.omega_c + std::abs(m.delta_c) + std::abs(delta_p)),
                   m.b0 * g, 3.0 * model.max_velocity_shift(), 4.0 * g});
}

std::vector<double> core_seeds(const MediumParams& m, const ResponseModel& model,
                               double delta_p, double A, double tau) {
  std::vector<double> mags = {A};
  const double g = m.gamma21;
  mags.push_back(g);
  if (m.three_level()) {
    mags.push_back(m.omega_c);
    mags.push_back(delta_pi(m));
    if (m.gamma31 > 0.0) mags.push_back(m.gamma31);
  }
  if (m.b0 * g < A) mags.push_back(m.b0 * g);
  if (model.max_velocity_shift() > 0.0) {
    mags.push_back(model.max_velocity_shift());
    mags.push_back(model.max_velocity_shift() / 3.0);
  }
  std::vector<double> pts;
  pts.push_back(0.0);
  for (double v : mags)
    if (v > 0.0 && v < A) pts.push_back(v), pts.push_back(-v);
  pts.push_back(A);
  pts.push_back(-A);
  // Light-shift structure of the velocity-averaged response near resonance.
  if (model.max_velocity_shift() > 0.0 && m.three_level()) {
    const double ls = 0.25 * m.omega_c * m.omega_c / std::max(doppler_sigma(m), 1e-300);
    for (double s : {-3.0, -1.0, 1.0, 3.0}) {
      const double v = s * ls - delta_p;
      if (std::abs(v) < A) pts.push_back(v);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)); }),
            pts.end());

  // Seed panels no longer than ~2 oscillation periods of e^{-iW tau} so the
  // error estimator sees the oscillation from the start.
  const double abs_tau = std::abs(tau);
  if (abs_tau <= 0.0) return pts;
  double losc = 4.0 * pi / abs_tau;
  const std::size_t cap = 200000;
  const double total = pts.back() - pts.front();
  if (total / losc > double(cap)) losc = total / double(cap);
  std::vector<double> seeded;
  seeded.reserve(std::size_t(total / losc) + pts.size());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    seeded.push_back(pts[i]);
    const double gap = pts[i + 1] - pts[i];
    const auto extra = std::size_t(std::floor(gap / losc));
    for (std::size_t k = 1; k <= extra; ++k) {
      const double x = pts[i] + gap * double(k) / double(extra + 1);
      seeded.push_back(x);
    }
  }
  seeded.push_back(pts.back());
  return seeded;
}

std::vector<double> geometric_seeds(double first, double last) {
  std::vector<double> seeds = {0.0};
  for (double s = first; s < last; s *= 2.0) seeds.push_back(s);
  seeds.push_back(last);
  return seeds;
}

// Step-on response at time tau after ignition, canonical frame.
std::complex<double> step_on_tau(const ResponseModel& model, double delta_p, double tau,
                                 const QuadratureControl& ctl) {
  const MediumParams& m = model.params();
  const std::complex<double> H0 = model.transmission(delta_p);
  if (tau >= steady_settle_time(m)) return H0;

  const double A = handoff_radius(m, delta_p, model);
  auto g = [&](std::complex<double> w) { return (model.transmission(delta_p + w) - H0) / w; };

  quad::Options opt{0.5 * ctl.rel_tol, 0.5 * ctl.abs_tol, ctl.max_panels};
  const auto seeds = core_seeds(m, model, delta_p, A, tau);
  const quad::Outcome core = quad::adaptive(
      [&](double w) { return g(w) * std::exp(std::complex<double>(0.0, -w * tau)); }, seeds,
      opt);

  // Tails along the descent direction of e^{-iW tau}; the paired rays are
  // integrated together so their 1/s parts cancel.
  const std::complex<double> phase_r = std::exp(std::complex<double>(0.0, -A * tau));
  const std::complex<double> phase_l = std::exp(std::complex<double>(0.0, A * tau));
  quad::Integrand tail_fn;
  if (tau >= 0.0) {
    tail_fn = [&, phase_r, phase_l](double s) {
      const double damp = std::exp(-s * tau);
      return damp * (-I * phase_r * g({A, -s}) + I * phase_l * g({-A, -s}));
    };
  } else {
    tail_fn = [&, phase_r, phase_l](double s) {
      const double damp = std::exp(s * tau);
      return damp * (I * phase_r * g({A, s}) - I * phase_l * g({-A, s}));
    };
  }
  const double s_max = (tau != 0.0)
                           ? std::max(16.0 * A, 80.0 / std::abs(tau))
                           : std::max(16.0 * A, 8.0 * A / std::max(ctl.abs_tol, 1e-14));
  // first panel no wider than the e^{-s|tau|} support, or its nodes miss it
  const double s_first =
      (tau != 0.0) ? std::min(A / 16.0, 0.25 / std::abs(tau)) : A / 16.0;
  const quad::Outcome tails = quad::adaptive(tail_fn, geometric_seeds(s_first, s_max), opt);

  const std::complex<double> R = core.value + tails.value;
  const double u = tau > 0.0 ? 1.0 : (tau == 0.0 ? 0.5 : 0.0);
  return H0 * u + I / (2.0 * pi) * R;
}

}  // namespace

std::complex<double> transmit_sample(const PulseSpec& pulse, const MediumParams& medium,
                                     double t, const QuadratureControl& ctl) {
  medium.validate();
  pulse.validate();
  const ResponseModel model(medium, ctl.hermite_order);
  const double tau = t - pulse.switch_time;
  switch (pulse.kind) {
    case PulseKind::step_on:
      return step_on_tau(model, pulse.delta_p, tau, ctl);
    case PulseKind::step_off:
      return model.transmission(pulse.delta_p) - step_on_tau(model, pulse.delta_p, tau, ctl);
    case PulseKind::square:
      return step_on_tau(model, pulse.delta_p, tau + pulse.duration, ctl) -
             step_on_tau(model, pulse.delta_p, tau, ctl);
    case PulseKind::periodic_square:
      return transmit_periodic_sample(pulse, medium, t, ctl);
  }
  throw ValidationError("unknown pulse kind");
}

// ---------------------------------------------------------------------------
// series backend
// ---------------------------------------------------------------------------

namespace {

// Exact steady periodic response. Two strategies by regime:
//   series          : harmonics of (H - 1 - q) (fast 1/W^3 or 1/W^2 decay
//                     once the rational part q is removed) plus the
//                     closed-form periodization of the q response
//   alias quadrature: slow modulation (T >= twice the settle time);
//                     single-square responses decayed between pulses,
//                     quadrature per alias
class PeriodicEvaluator {
public:
  PeriodicEvaluator(const PulseSpec& pulse, const MediumParams& medium,
                    const QuadratureControl& ctl)
      : pulse_(pulse), medium_(medium), ctl_(ctl), model_(medium, ctl.hermite_order) {
    pulse_.validate();
    if (pulse_.kind != PulseKind::periodic_square)
      throw ValidationError("series backend requires a periodic_square pulse");
    period_ = pulse_.period;
    wm_ = 2.0 * pi / period_;
    if (period_ >= 2.0 * steady_settle_time(medium_)) {
      alias_path_ = true;
      return;
    }
    corr_ = make_tail_correction(model_, pulse_.delta_p);
    q_carrier_ = corr_.q(0.0);
    build_series();
  }

  std::complex<double> at(double t) const {
    const double tau = t - pulse_.switch_time;
    if (alias_path_) return pulse_.envelope(t) + quadrature_alias_sum(tau);
    return pulse_.envelope(t) + series_sum(tau) + periodic_correction(tau);
  }

private:
  double sampling_floor() const { return flash_time_scale(medium_) / 100.0; }

  double pole_clearance() const {
    const double g = medium_.gamma21;
    return 8.0 * (g + medium_.omega_c + std::abs(medium_.delta_c) + std::abs(pulse_.delta_p)) +
           2.0 * medium_.b0 * g + 3.0 * model_.max_velocity_shift();
  }

  // Truncation cutoff for the residual series, from the tail envelope
  // |c_n (H-1-q)| ~ zeta^{m+1}/(pi n) and the edge-adjacent evaluation
  // distance tau_f/100.
  double series_cutoff() const {
    const double eps = 0.5 * ctl_.series_tail_tol;
    const double dt_min = sampling_floor();
    const double strength = 0.25 * medium_.b0 * medium_.gamma21;
    const double lambda =
        corr_.second_order
            ? std::pow(strength * strength * strength / (pi * eps * dt_min), 0.25)
            : std::cbrt(strength * strength / (pi * eps * dt_min));
    return std::max(lambda, pole_clearance());
  }

  void build_series() {
    const double cutoff = series_cutoff();
    const auto n_max = (unsigned long long)std::ceil(cutoff / wm_);
    if (n_max > ctl_.max_harmonics)
      throw TruncationError("series truncation: " + std::to_string(n_max) +
                            " harmonics needed, limit " + std::to_string(ctl_.max_harmonics));
    const double dp = pulse_.delta_p;
    auto residual = [&](double w) {
      return model_.transmission(dp + w) - 1.0 - corr_.q(w);
    };
    a0_ = 0.5 * residual(0.0);
    a_pos_.reserve(n_max / 2 + 1);
    a_neg_.reserve(n_max / 2 + 1);
    for (unsigned long long k = 1; k <= n_max; k += 2) {
      const std::complex<double> cn{0.0, -1.0 / (pi * double(k))};  // c_{+k}, odd
      const double wk = double(k) * wm_;
      a_pos_.push_back(cn * residual(wk));
      a_neg_.push_back(std::conj(cn) * residual(-wk));
    }
  }

  std::complex<double> series_sum(double tau) const {
    std::complex<double> sum = a0_;
    const std::complex<double> rot2 = std::exp(std::complex<double>(0.0, -2.0 * wm_ * tau));
    std::complex<double> ph = std::exp(std::complex<double>(0.0, -wm_ * tau));
    for (std::size_t i = 0; i < a_pos_.size(); ++i) {
      sum += a_pos_[i] * ph + a_neg_[i] * std::conj(ph);
      ph *= rot2;
    }
    return sum;
  }

  // Closed-form periodization of the q step response: geometric sums of the
  // exponential-polynomial kernels over all past pulse edges.
  std::complex<double> periodic_correction(double tau) const {
    const double T = period_;
    const double y_ext = tau - T * std::floor(tau / T);          // extinction age, [0, T)
    const double shifted = tau + 0.5 * T;
    const double y_ign = shifted - T * std::floor(shifted / T);  // ignition age, [0, T)
    std::complex<double> acc = (y_ign < y_ext) ? q_carrier_ : std::complex<double>{0.0, 0.0};
    for (const auto& term : corr_.terms)
      acc += edge_sum(term, y_ign) - edge_sum(term, y_ext);
    return acc;
  }

  // sum_{m>=0} e^{-ip(y0+mT)} P(y0+mT) for one kernel term.
  std::complex<double> edge_sum(const PoleKernelTerm& t, double y0) const {
    const double T = period_;
    const std::complex<double> rho = std::exp(-I * t.p * T);
    // geometric moments mu_i = sum_{m>=0} m^i rho^m, i <= 3
    const std::complex<double> om = 1.0 - rho;
    std::complex<double> mu[4];
    mu[0] = 1.0 / om;
    mu[1] = rho / (om * om);
    mu[2] = rho * (1.0 + rho) / (om * om * om);
    mu[3] = rho * (1.0 + 4.0 * rho + rho * rho) / (om * om * om * om);
    // z_d = sum_m (y0 + mT)^d rho^m = sum_i C(d,i) y0^{d-i} T^i mu_i
    static constexpr double binom[4][4] = {
        {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    std::complex<double> z[4];
    for (int d = 0; d < 4; ++d) {
      std::complex<double> acc{0.0, 0.0};
      for (int i = 0; i <= d; ++i)
        acc += binom[d][i] * std::pow(y0, d - i) * std::pow(T, i) * mu[i];
      z[d] = acc;
    }
    // P(y) = coeff sum_{j=1..k} (-1)^{k-j} (-i y)^{j-1} / (p^{k-j+1} (j-1)!)
    std::complex<double> p_down{1.0, 0.0};
    for (int j = 0; j < t.k; ++j) p_down *= t.p;  // p^k at j=1
    double sign = (t.k % 2 == 0) ? -1.0 : 1.0;    // (-1)^{k-j} at j=1
    std::complex<double> i_pow{1.0, 0.0};         // (-i)^{j-1}/(j-1)!
    std::complex<double> acc{0.0, 0.0};
    for (int j = 1; j <= t.k; ++j) {
      acc += sign * i_pow / p_down * z[j - 1];
      sign = -sign;
      i_pow *= -I / double(j);
      p_down /= t.p;
    }
    return t.coeff * std::exp(-I * t.p * y0) * acc;
  }

  // --- slow modulation: quadrature per pulse alias ---

  std::complex<double> full_scattered_square(double x) const {
    const double half = 0.5 * period_;
    const double env = (x > -half && x < 0.0) ? 1.0 : 0.0;
    const std::complex<double> on_lead =
        (x + half <= 0.0) ? 0.0 : step_on_tau(model_, pulse_.delta_p, x + half, ctl_);
    const std::complex<double> on_lag =
        (x <= 0.0) ? 0.0 : step_on_tau(model_, pulse_.delta_p, x, ctl_);
    return on_lead - on_lag - env;
  }

  std::complex<double> quadrature_alias_sum(double tau) const {
    const double half = 0.5 * period_;
    const double settle = steady_settle_time(medium_);
    const auto m_lo = (long long)std::ceil((-half - tau) / period_);
    const auto m_hi = (long long)std::floor((settle - tau) / period_) + 1;
    std::complex<double> acc{0.0, 0.0};
    for (long long m = m_lo; m <= m_hi; ++m)
      acc += full_scattered_square(tau + double(m) * period_);
    return acc;
  }

  PulseSpec pulse_;
  MediumParams medium_;
  QuadratureControl ctl_;
  ResponseModel model_;
  bool alias_path_ = false;
  double period_ = 0.0;
  double wm_ = 0.0;
  TailCorrection corr_;
  std::complex<double> q_carrier_{};
  std::complex<double> a0_{};
  std::vector<std::complex<double>> a_pos_;
  std::vector<std::complex<double>> a_neg_;
};

}  // namespace

std::complex<double> transmit_periodic_sample(const PulseSpec& pulse,
                                              const MediumParams& medium, double t,
                                              const QuadratureControl& ctl) {
  medium.validate();
  const PeriodicEvaluator eval(pulse, medium, ctl);
  return eval.at(t);
}

FieldTrace transmit_periodic(const PulseSpec& pulse, const MediumParams& medium,
                             const TimeWindow& window, std::size_t n_samples,
                             const QuadratureControl& ctl) {
  medium.validate();
  if (n_samples < 2) throw ValidationError("n_samples >= 2");
  if (!(window.end > window.begin)) throw ValidationError("time window end > begin");
  const PeriodicEvaluator eval(pulse, medium, ctl);
  FieldTrace trace;
  trace.t0 = window.begin;
  trace.dt = (window.end - window.begin) / double(n_samples - 1);
  trace.pulse = pulse;
  trace.medium = medium;
  trace.samples.resize(n_samples);
  parallel_for(n_samples, 0, [&](std::size_t i) {
    trace.samples[i] = eval.at(trace.t0 + trace.dt * double(i));
  });
  return trace;
}

}  // namespace eitflash
