#include "eitflash/medium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "eitflash/errors.hpp"
#include "eitflash/quadrature.hpp"

namespace eitflash {

namespace {
constexpr double k_boltzmann = 1.380649e-23;  // J/K
constexpr std::complex<double> I{0.0, 1.0};
}  // namespace

void MediumParams::validate() const {
  if (!(b0 > 0.0)) throw ValidationError("b0 > 0");
  if (!(gamma21 > 0.0)) throw ValidationError("gamma21 > 0");
  if (!(gamma31 >= 0.0)) throw ValidationError("gamma31 >= 0");
  if (!(omega_c >= 0.0)) throw ValidationError("omega_c >= 0");
  if (!(temperature >= 0.0)) throw ValidationError("temperature >= 0");
  if (temperature > 0.0 && doppler_mode != DopplerMode::off) {
    if (!(atom_mass > 0.0) || !(wave_number_k > 0.0) || !(gamma21_rad_s > 0.0))
      throw ValidationError(
          "temperature > 0 requires atom_mass, wave_number_k and gamma21_rad_s");
  }
}

MediumParams MediumParams::two_level_copy() const {
  MediumParams copy = *this;
  copy.omega_c = 0.0;
  return copy;
}

MediumParams medium_preset(const std::string& name) {
  if (name == "rubidium-d2") {
    MediumParams p;
    p.gamma21_rad_s = 2.0 * std::numbers::pi * 6.0e6;   // gamma21/2pi = 6 MHz
    p.wave_number_k = 2.0 * std::numbers::pi * 1.28e6;  // k/2pi = 1.28e6 1/m
    p.atom_mass = 1.443e-25;                            // 87Rb, kg
    return p;
  }
  throw ValidationError("unknown preset '" + name + "' (available: rubidium-d2)");
}

std::vector<std::string> medium_preset_names() { return {"rubidium-d2"}; }

std::complex<double> zeta_two_level(std::complex<double> delta, const MediumParams& p) {
  const double g = p.gamma21;
  return I * (0.25 * p.b0 * g) / (delta + I * (0.5 * g));
}

std::complex<double> zeta_three_level(std::complex<double> delta, const MediumParams& p) {
  if (!p.three_level()) return zeta_two_level(delta, p);
  const double g = p.gamma21;
  const std::complex<double> one_photon = delta + I * (0.5 * g);
  const std::complex<double> two_photon = delta - p.delta_c + I * (0.5 * p.gamma31);
  const double rabi_sq = 0.25 * p.omega_c * p.omega_c;
  return I * (0.25 * p.b0 * g) * two_photon / (one_photon * two_photon - rabi_sq);
}

std::complex<double> zeta_with_velocity(std::complex<double> delta, double kv,
                                        const MediumParams& p) {
  if (kv == 0.0) return zeta_three_level(delta, p);
  switch (p.doppler_mode) {
    case DopplerMode::simple_shift:
      return zeta_three_level(delta - kv, p);
    case DopplerMode::copropagating: {
      if (!p.three_level()) return zeta_two_level(delta - kv, p);
      const double g = p.gamma21;
      const std::complex<double> one_photon = delta - kv + I * (0.5 * g);
      const std::complex<double> two_photon = delta - p.delta_c + I * (0.5 * p.gamma31);
      const double rabi_sq = 0.25 * p.omega_c * p.omega_c;
      return I * (0.25 * p.b0 * g) * two_photon / (one_photon * two_photon - rabi_sq);
    }
    case DopplerMode::off:
      return zeta_three_level(delta, p);
  }
  return zeta_three_level(delta, p);
}

std::complex<double> zeta_linearized(double delta_p, const MediumParams& p) {
  if (!(p.omega_c > 0.0)) throw ValidationError("omega_c > 0 required for linearized response");
  const double bound = 0.1 * std::min(p.omega_c, p.gamma21);
  if (std::abs(delta_p) > bound)
    throw ValidationError("linearized response untrusted: |delta_p| > 0.1 min(omega_c, gamma21)");
  const double rabi_sq = p.omega_c * p.omega_c;
  const double re = 0.5 * p.b0 * p.gamma21 * p.gamma31 / rabi_sq;
  const double im = -delta_p * p.b0 * p.gamma21 / rabi_sq;
  return {re, im};
}

ComplexResponse response_two_level(double delta, const MediumParams& p) {
  return {zeta_two_level(delta, p)};
}
ComplexResponse response_three_level(double delta, const MediumParams& p) {
  return {zeta_three_level(delta, p)};
}
ComplexResponse response_linearized(double delta_p, const MediumParams& p) {
  return {zeta_linearized(delta_p, p)};
}

double group_delay(const MediumParams& p) {
  if (!(p.omega_c > 0.0)) throw ValidationError("group delay undefined for omega_c = 0");
  return p.b0 * p.gamma21 / (p.omega_c * p.omega_c);
}

double flash_time_scale(const MediumParams& p) { return 1.0 / (p.b0 * p.gamma21); }

double delta_pi(const MediumParams& p) {
  if (!(p.omega_c > 0.0)) throw ValidationError("delta_pi undefined for omega_c = 0");
  return std::numbers::pi * p.omega_c * p.omega_c / (p.b0 * p.gamma21);
}

double doppler_sigma(const MediumParams& p) {
  if (!(p.temperature > 0.0)) return 0.0;
  if (!(p.atom_mass > 0.0) || !(p.wave_number_k > 0.0) || !(p.gamma21_rad_s > 0.0))
    throw ValidationError(
        "temperature > 0 requires atom_mass, wave_number_k and gamma21_rad_s");
  const double sigma_v = std::sqrt(k_boltzmann * p.temperature / p.atom_mass);
  return p.wave_number_k * sigma_v / p.gamma21_rad_s * p.gamma21;
}

double time_to_seconds(double t_gamma21, const MediumParams& p) {
  if (!(p.gamma21_rad_s > 0.0))
    throw ValidationError("gamma21_rad_s must be set for unit conversion");
  return t_gamma21 / p.gamma21 / p.gamma21_rad_s;
}

namespace {

// Nodes by Newton iteration on the orthonormal Hermite recurrence
//   p_{n+1} = x sqrt(2/(n+1)) p_n - sqrt(n/(n+1)) p_{n-1},
// weights w_i = 1/(n p_{n-1}(x_i)^2). Initial guesses follow the usual
// largest-root asymptotics with marching.
HermiteRule compute_hermite(int n) {
  if (n < 1) throw ValidationError("hermite order >= 1");
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  double z = 0.0;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      z -= 1.14 * std::pow(n, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(double(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;  // derivative via p'_n = sqrt(2n) p_{n-1}
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;                  // descending positive side
    rule.nodes[n - 1 - i] = -z;
    const double w = 2.0 / (pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

const HermiteRule& hermite_rule(int order) {
  static std::mutex mu;
  static std::map<int, HermiteRule> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_hermite(order)).first;
  return it->second;
}

ResponseFn doppler_average(VelocityResponseFn base, const MediumParams& p,
                           int hermite_order) {
  if (!(p.temperature > 0.0) || p.doppler_mode == DopplerMode::off)
    return [base](std::complex<double> delta) { return base(delta, 0.0); };
  const double sigma = doppler_sigma(p);  // validates mass/k
  const HermiteRule& rule = hermite_rule(hermite_order);
  const double scale = std::numbers::sqrt2 * sigma;
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  return [base, rule, scale, inv_sqrt_pi](std::complex<double> delta) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += inv_sqrt_pi * rule.weights[i] * base(delta, scale * rule.nodes[i]);
    return acc;
  };
}

ResponseModel::ResponseModel(const MediumParams& p, int hermite_order)
    : params_(p), hermite_order_(hermite_order) {
  params_.validate();
  if (params_.doppler_active()) {
    sigma_kv_ = doppler_sigma(params_);
    max_kv_ = 12.0 * sigma_kv_;
  }
}

std::complex<double> ResponseModel::zeta(std::complex<double> delta) const {
  if (!params_.doppler_active()) return zeta_three_level(delta, params_);
  const double sigma = sigma_kv_;
  if (sigma < 1e-3 * params_.gamma21) {
    // narrow thermal distribution: the response is smooth across it and a
    // low-order Hermite rule is exact
    const HermiteRule& rule = hermite_rule(16);
    const double scale = std::numbers::sqrt2 * sigma;
    const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += inv_sqrt_pi * rule.weights[i] *
             zeta_with_velocity(delta, scale * rule.nodes[i], params_);
    return acc;
  }
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  auto integrand = [&](double kv) -> std::complex<double> {
    const double x = kv / sigma;
    return norm * std::exp(-0.5 * x * x) * zeta_with_velocity(delta, kv, params_);
  };

  // seeds: thermal scales plus the per-class resonance locations in kv
  std::vector<double> pts = {0.0};
  for (double s : {1.0, 2.0, 4.0, 7.0, 12.0}) {
    pts.push_back(s * sigma);
    pts.push_back(-s * sigma);
  }
  const double bound = 12.0 * sigma;
  const double g = params_.gamma21;
  auto push_pole = [&](std::complex<double> kv_pole) {
    const double re = kv_pole.real();
    if (std::abs(re) < bound) pts.push_back(re);
  };
  if (params_.three_level()) {
    const std::complex<double> two_photon =
        delta - params_.delta_c + std::complex<double>(0.0, 0.5 * params_.gamma31);
    const double rabi_sq = 0.25 * params_.omega_c * params_.omega_c;
    if (params_.doppler_mode == DopplerMode::copropagating) {
      if (std::abs(two_photon) > 1e-300)
        push_pole(delta + std::complex<double>(0.0, 0.5 * g) - rabi_sq / two_photon);
    } else {
      // poles of chi(delta - kv) in kv
      const std::complex<double> u{0.0, 0.5 * g};
      const std::complex<double> v =
          -params_.delta_c + std::complex<double>(0.0, 0.5 * params_.gamma31);
      const std::complex<double> disc =
          std::sqrt((u - v) * (u - v) + params_.omega_c * params_.omega_c);
      push_pole(delta + 0.5 * (u + v) - 0.5 * disc);
      push_pole(delta + 0.5 * (u + v) + 0.5 * disc);
    }
  } else {
    push_pole(delta + std::complex<double>(0.0, 0.5 * g));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](double a, double b) { return std::abs(a - b) < 1e-12 * sigma; }),
            pts.end());

  quad::Options opt;
  opt.rel_tol = 1e-11;
  opt.abs_tol = 1e-12;
  opt.max_panels = 50000;
  return quad::adaptive(integrand, pts, opt).value;
}

}  // namespace eitflash
