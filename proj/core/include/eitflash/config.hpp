#pragma once

#include <string>
#include <utility>
#include <vector>

#include "eitflash/medium.hpp"
#include "eitflash/propagate.hpp"
#include "eitflash/pulse.hpp"

namespace eitflash {

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;  // 0 = unset
  bool log_scale = false;

  bool set() const { return count > 0; }
  // Throws ValidationError ("sweep counts >= 2", ordering, log positivity).
  std::vector<double> values() const;
};

// Fully resolved run configuration: medium + pulse parameters, grid
// overrides, sweep ranges, output settings. All physics invariants are
// checked before any computation starts.
struct RunConfig {
  MediumParams medium;
  PulseSpec pulse;
  std::string preset;  // empty or a medium preset name

  bool has_grid = false;
  SpectralGrid grid{};

  SweepRange delta_p_sweep;  // fringe/b0map/modmap/doppler detuning axis
  SweepRange period_sweep;   // modmap
  SweepRange b0_sweep;       // b0map
  std::vector<double> temperatures;  // doppler

  std::string out_dir = "out";
  int workers = 0;            // 0 = EITFLASH_WORKERS or hardware
  unsigned long seed = 0;     // reserved; physics is deterministic

  bool duration_set = false;  // explicit [pulse] duration given
  void validate() const;
};

using KeyValue = std::pair<std::string, std::string>;

// Plain-text INI config (sections [medium], [pulse], [grid], [sweep],
// [output]; '#' or ';' comments). Unknown sections or keys are errors with
// the offending line number. `overrides` ("section.key", value) are applied
// after the file, so flags win.
RunConfig parse_config(const std::string& path, const std::vector<KeyValue>& overrides = {});
RunConfig parse_config_text(const std::string& text, const std::vector<KeyValue>& overrides = {});
RunConfig config_from_overrides(const std::vector<KeyValue>& overrides);

// Default single-square duration when none is given: 4 tau_EIT for
// three-level media, 2000/gamma21 otherwise.
double default_square_duration(const MediumParams& medium);

// Resolved config as INI text (round-trips through parse_config_text).
std::string config_to_ini(const RunConfig& config);

}  // namespace eitflash
