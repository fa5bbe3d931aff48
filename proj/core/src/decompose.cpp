#include "eitflash/decompose.hpp"

#include <cmath>
#include <numbers>

#include "eitflash/errors.hpp"

namespace eitflash {

namespace {

FieldTrace incident_trace_like(const FieldTrace& total) {
  FieldTrace e_i = total;
  e_i.grid = SpectralGrid{};
  e_i.edge_residual = 0.0;
  for (std::size_t k = 0; k < e_i.samples.size(); ++k)
    e_i.samples[k] = incident_amplitude(total.pulse, e_i.time_at(k));
  return e_i;
}

}  // namespace

std::complex<double> DecomposedFields::total_at(std::size_t i) const {
  std::complex<double> sum = e_i.samples[i] + e_s.samples[i];
  if (e_eit) sum += e_eit->samples[i];
  return sum;
}

DecomposedFields decompose(const FieldTrace& total, int workers) {
  if (total.samples.empty()) throw ValidationError("empty trace");
  if (total.grid.n_points == 0)
    throw ValidationError("decompose requires a transform-backend trace (grid attached)");

  DecomposedFields out;
  out.e_i = incident_trace_like(total);

  const MediumParams two = total.medium.two_level_copy();
  const std::size_t stride = std::size_t(std::llround(total.dt / total.grid.dt()));
  FieldTrace two_total =
      transmit_trace(total.pulse, two, total.grid,
                     TimeWindow{total.t0, total.end_time()}, std::max<std::size_t>(stride, 1),
                     workers);
  if (two_total.size() != total.size() || std::abs(two_total.t0 - total.t0) > 1e-9 ||
      std::abs(two_total.dt - total.dt) > 1e-12)
    throw ValidationError("decompose: two-level re-run grid mismatch");

  out.e_s = std::move(two_total);
  for (std::size_t k = 0; k < out.e_s.samples.size(); ++k)
    out.e_s.samples[k] -= out.e_i.samples[k];

  if (total.medium.three_level()) {
    FieldTrace eit = total;
    for (std::size_t k = 0; k < eit.samples.size(); ++k)
      eit.samples[k] -= out.e_i.samples[k] + out.e_s.samples[k];
    out.e_eit = std::move(eit);
  }
  return out;
}

double wrap_angle(double phi) {
  double w = std::remainder(phi, 2.0 * std::numbers::pi);
  if (w >= std::numbers::pi) w -= 2.0 * std::numbers::pi;
  return w;
}

double phase_difference_formula(const MediumParams& medium, double delta_p) {
  if (!(medium.omega_c > 0.0))
    throw ValidationError("phase difference formula undefined for omega_c = 0");
  const double phi_eit = medium.b0 * medium.gamma21 * delta_p / (medium.omega_c * medium.omega_c);
  return wrap_angle(phi_eit - std::numbers::pi);
}

ExtractedPhases extract_phases(const DecomposedFields& fields, double t, double floor) {
  if (!fields.e_eit)
    throw ValidationError("extract_phases requires a three-level decomposition");
  const std::complex<double> es = fields.e_s.at_time(t);
  const std::complex<double> eeit = fields.e_eit->at_time(t);
  if (std::abs(es) < floor || std::abs(eeit) < floor)
    throw NumericalError("extract_phases: field magnitude below threshold");
  ExtractedPhases out;
  out.phi_s = std::arg(es);
  out.phi_eit = std::arg(eeit);
  out.delta_phi = std::arg(eeit / es);
  return out;
}

}  // namespace eitflash
