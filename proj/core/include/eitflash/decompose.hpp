#pragma once

#include <complex>
#include <optional>

#include "eitflash/propagate.hpp"

namespace eitflash {

// Splitting of the transmitted field into incident, forward-scattered
// (two-level) and EIT components:
//   E = E_i + E_s            (two-level media)
//   E = E_i + E_s + E_EIT    (three-level media)
// E_s is defined as the omega_c = 0 transmitted field minus the incident
// one; E_EIT is the remainder. The reconstruction is exact by definition.
struct DecomposedFields {
  FieldTrace e_i;
  FieldTrace e_s;
  std::optional<FieldTrace> e_eit;  // absent for two-level media

  std::complex<double> total_at(std::size_t i) const;
};

// Re-runs the transform backend with omega_c = 0 on the same pulse and grid
// as `total`. For a two-level input medium, e_eit is identically zero
// (dropped). Throws ValidationError on sample grid mismatch.
DecomposedFields decompose(const FieldTrace& total, int workers = 0);

// Eq.-(8)-style steady-state phase difference,
//   dphi = b0 gamma21 delta_p / |omega_c|^2 - pi,
// wrapped to [-pi, pi).
double phase_difference_formula(const MediumParams& medium, double delta_p);

struct ExtractedPhases {
  double phi_s;
  double phi_eit;
  double delta_phi;  // wrapped difference, computed on the complex ratio
};

// Complex arguments of e_s(t) and e_eit(t). Throws NumericalError when
// either magnitude is below `floor` (phases of near-zero fields are
// meaningless).
ExtractedPhases extract_phases(const DecomposedFields& fields, double t,
                               double floor = 1e-6);

double wrap_angle(double phi);  // to [-pi, pi)

}  // namespace eitflash
