#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace eitflash {

// How atomic motion enters the susceptibility when temperature > 0.
//
//   simple_shift   : delta -> delta - k*v everywhere (single-photon and
//                    two-photon detunings both shifted).
//   copropagating  : only the single-photon factors (delta + i*gamma21/2)
//                    are shifted; the two-photon detuning (delta - delta_c)
//                    is velocity-free, as for copropagating probe/control
//                    beams with k_p ~ k_c.
enum class DopplerMode { off, simple_shift, copropagating };

// Atomic/medium constants. All rates and frequencies are expressed in units
// of gamma21, times in 1/gamma21; gamma21 is fixed to 1 internally and
// gamma21_rad_s carries the physical value (rad/s) for unit conversion only.
// The bulk properties (density, length) enter solely through b0; the wave
// number and mass are used only for Doppler averaging.
struct MediumParams {
  double b0 = 200.0;             // resonant single-photon optical depth
  double gamma21 = 1.0;          // excited-state linewidth (the rate unit)
  double gamma31 = 0.0;          // ground-state coherence relaxation rate
  double omega_c = 0.0;          // control Rabi frequency; 0 => two-level
  double delta_c = 0.0;          // control detuning
  double gamma21_rad_s = 0.0;    // physical gamma21 in rad/s (0 = unset)
  double wave_number_k = 0.0;    // probe wave number, 1/m (Doppler only)
  double atom_mass = 0.0;        // kg (Doppler only)
  double temperature = 0.0;      // K; 0 disables Doppler
  DopplerMode doppler_mode = DopplerMode::off;

  bool three_level() const { return omega_c > 0.0; }
  bool doppler_active() const {
    return temperature > 0.0 && doppler_mode != DopplerMode::off;
  }

  // Throws ValidationError naming the violated invariant.
  void validate() const;

  // Two-level copy (omega_c = 0), used by the field decomposition.
  MediumParams two_level_copy() const;
};

// Named presets exposed to the CLI. Throws ValidationError for unknown names.
MediumParams medium_preset(const std::string& name);
std::vector<std::string> medium_preset_names();

// Per-frequency complex opacity zeta(delta) = b(delta)/2 - i*phi(delta).
// The transmitted amplitude factor is H(delta) = exp(-zeta(delta)).
struct ComplexResponse {
  std::complex<double> zeta;
  std::complex<double> transmission() const { return std::exp(-zeta); }
};

// One-photon (two-level) response,
//   zeta(delta) = (i b0 gamma21 / 4) / (delta + i gamma21/2).
// Accepts complex detunings; the response is analytic off its poles, which
// the propagation backends exploit for contour integration.
std::complex<double> zeta_two_level(std::complex<double> delta, const MediumParams& p);

// Lambda-system response; reduces exactly to zeta_two_level when omega_c = 0
// (dispatched, so the two-photon denominator zero is unreachable):
//   zeta(delta) = (i b0 gamma21 / 4) (delta - delta_c + i gamma31/2)
//                 / [(delta + i gamma21/2)(delta - delta_c + i gamma31/2) - |omega_c|^2/4]
std::complex<double> zeta_three_level(std::complex<double> delta, const MediumParams& p);

// zeta with the velocity shift kv (gamma21 units) applied per doppler_mode.
std::complex<double> zeta_with_velocity(std::complex<double> delta, double kv,
                                        const MediumParams& p);

// First-order small-detuning response (delta_c = 0, |delta_p| << omega_c, gamma21):
//   Re zeta = (b0/2) gamma21 gamma31 / |omega_c|^2   (constant)
//   Im zeta = -delta_p b0 gamma21 / |omega_c|^2      (linear)
// Throws ValidationError outside |delta_p| <= 0.1 min(omega_c, gamma21),
// where the linearization is untrusted.
std::complex<double> zeta_linearized(double delta_p, const MediumParams& p);

ComplexResponse response_two_level(double delta, const MediumParams& p);
ComplexResponse response_three_level(double delta, const MediumParams& p);
ComplexResponse response_linearized(double delta_p, const MediumParams& p);

// EIT group delay tau_EIT = b0 gamma21 / |omega_c|^2. Throws for omega_c = 0.
double group_delay(const MediumParams& p);

// Cooperative flash time scale, 1/(b0 gamma21). Order-of-magnitude estimate.
double flash_time_scale(const MediumParams& p);

// Detuning of the first constructive fringe, pi |omega_c|^2 / (b0 gamma21).
// Throws for omega_c = 0.
double delta_pi(const MediumParams& p);

// Thermal velocity spread expressed as a frequency: k * sqrt(kB T / m) in
// gamma21 units. Requires the physical constants to be set.
double doppler_sigma(const MediumParams& p);

// Convert a time in 1/gamma21 units to seconds using gamma21_rad_s.
double time_to_seconds(double t_gamma21, const MediumParams& p);

// Gauss-Hermite abscissas/weights for int f(x) exp(-x^2) dx, computed to
// machine precision by Newton iteration on the orthonormal recurrence.
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const HermiteRule& hermite_rule(int order);

using ResponseFn = std::function<std::complex<double>(std::complex<double>)>;
// Base response parameterized by the velocity shift kv (gamma21 units).
using VelocityResponseFn =
    std::function<std::complex<double>(std::complex<double>, double)>;

// Velocity average of the susceptibility over the 1D Maxwell-Boltzmann
// density, by Gauss-Hermite quadrature: delta -> sum_i w_i base(delta, kv_i)
// with kv_i = sqrt(2) sigma_kv x_i. The averaged quantity is zeta itself,
// not the transmitted amplitude. T = 0 returns base(., 0) unchanged.
// Throws ValidationError when temperature > 0 but mass/k are unset.
ResponseFn doppler_average(VelocityResponseFn base, const MediumParams& p,
                           int hermite_order = 64);

// Dispatching response model: two-level/three-level selection on omega_c,
// Doppler averaging when configured. This is the object the propagation
// backends consume.
//
// The velocity average is evaluated by adaptive quadrature with seeds at
// the (light-shifted) per-class resonance poles rather than by the
// fixed-order Gauss-Hermite rule: the per-class resonance has width
// ~gamma21/2 in kv, which a 64-node rule cannot resolve against thermal
// widths of tens of gamma21 (the rule's node spacing exceeds the feature
// width already at ~1 K for rubidium parameters). The Gauss-Hermite helper
// remains available via doppler_average and agrees with this model in its
// domain of validity.
class ResponseModel {
public:
  explicit ResponseModel(const MediumParams& p, int hermite_order = 64);

  std::complex<double> zeta(std::complex<double> delta) const;
  std::complex<double> transmission(std::complex<double> delta) const {
    return std::exp(-zeta(delta));
  }

  const MediumParams& params() const { return params_; }
  int hermite_order() const { return hermite_order_; }

  // Largest |kv| sampled by the velocity average (0 without Doppler); the
  // response is analytic outside a disk of roughly this radius plus the
  // single-photon scales.
  double max_velocity_shift() const { return max_kv_; }

private:
  MediumParams params_;
  int hermite_order_ = 64;
  double sigma_kv_ = 0.0;
  double max_kv_ = 0.0;
};

}  // namespace eitflash
