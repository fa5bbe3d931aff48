// eitflash: transient probe transmission through two-level and three-level
// lambda media. Subcommands map to the library experiments; every run
// writes a CSV data file, an SVG plot and a metadata record into --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "eitflash/analysis.hpp"
#include "eitflash/config.hpp"
#include "eitflash/decompose.hpp"
#include "eitflash/errors.hpp"
#include "eitflash/medium.hpp"
#include "eitflash/output.hpp"
#include "eitflash/propagate.hpp"
#include "eitflash/sweep.hpp"
#include "eitflash/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eitflash;

namespace {

struct FlagBinding {
  CLI::Option* option = nullptr;
  std::string key;
  std::string value;
};

struct CommonArgs {
  std::string config_path;
  CLI::Option* config_opt = nullptr;
  std::vector<FlagBinding> bindings;

  void bind(CLI::App* sub, const std::string& flag, const std::string& key,
            const std::string& help) {
    bindings.push_back({});
    FlagBinding& b = bindings.back();
    b.key = key;
    b.option = sub->add_option(flag, b.value, help);
  }

  void add_to(CLI::App* sub) {
    // CLI11 holds references to the value slots; the vector must not move
    bindings.reserve(32);
    config_opt = sub->add_option("--config", config_path, "INI config file");
    bind(sub, "--b0", "medium.b0", "resonant optical depth");
    bind(sub, "--gamma31", "medium.gamma31", "ground-state coherence rate (gamma21 units)");
    bind(sub, "--omega-c", "medium.omega_c", "control Rabi frequency (gamma21 units)");
    bind(sub, "--delta-c", "medium.delta_c", "control detuning (gamma21 units)");
    bind(sub, "--preset", "medium.preset", "medium preset (rubidium-d2)");
    bind(sub, "--temperature", "medium.temperature", "temperature, K");
    bind(sub, "--doppler-mode", "medium.doppler_mode", "off|simple_shift|copropagating");
    bind(sub, "--kind", "pulse.kind", "step_on|step_off|square|periodic_square");
    bind(sub, "--delta-p", "pulse.delta_p", "probe detuning (gamma21 units)");
    bind(sub, "--duration", "pulse.duration", "square pulse duration (1/gamma21)");
    bind(sub, "--period", "pulse.period", "modulation period (1/gamma21)");
    bind(sub, "--switch-time", "pulse.switch_time", "falling-edge epoch (1/gamma21)");
    bind(sub, "--span", "grid.span", "spectral grid half-extent (gamma21 units)");
    bind(sub, "--n-points", "grid.n_points", "spectral grid size (power of two)");
    bind(sub, "--delta-p-start", "sweep.delta_p_start", "");
    bind(sub, "--delta-p-stop", "sweep.delta_p_stop", "");
    bind(sub, "--delta-p-count", "sweep.delta_p_count", "");
    bind(sub, "--delta-p-scale", "sweep.delta_p_scale", "linear|log");
    bind(sub, "--period-start", "sweep.period_start", "");
    bind(sub, "--period-stop", "sweep.period_stop", "");
    bind(sub, "--period-count", "sweep.period_count", "");
    bind(sub, "--period-scale", "sweep.period_scale", "linear|log");
    bind(sub, "--b0-start", "sweep.b0_start", "");
    bind(sub, "--b0-stop", "sweep.b0_stop", "");
    bind(sub, "--b0-count", "sweep.b0_count", "");
    bind(sub, "--b0-scale", "sweep.b0_scale", "linear|log");
    bind(sub, "--temperatures", "sweep.temperatures", "comma list, K");
    bind(sub, "--out", "output.dir", "output directory");
    bind(sub, "--workers", "output.workers", "worker count (0 = auto)");
    bind(sub, "--seed", "output.seed", "reserved");
  }

  RunConfig resolve() const {
    std::vector<KeyValue> overrides;
    for (const auto& b : bindings)
      if (b.option->count() > 0) overrides.push_back({b.key, b.value});
    if (config_opt->count() > 0) return parse_config(config_path, overrides);
    return config_from_overrides(overrides);
  }
};

struct RunContext {
  std::string subcommand;
  RunConfig config;
  fs::path out_dir;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }

  void write_metadata(json extra = {}) {
    json meta;
    meta["subcommand"] = subcommand;
    meta["version"] = version;
    meta["workers"] = resolve_workers(config.workers);
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    meta["config_ini"] = config_to_ini(config);
    meta["tolerances"] = {{"quadrature_rel_tol", QuadratureControl{}.rel_tol},
                          {"quadrature_abs_tol", QuadratureControl{}.abs_tol},
                          {"series_tail_tol", QuadratureControl{}.series_tail_tol},
                          {"hermite_order", QuadratureControl{}.hermite_order}};
    if (!extra.empty()) meta["results"] = extra;
    meta["outputs"] = outputs;
    std::ofstream out(out_dir / "metadata.json");
    out << meta.dump(2) << "\n";
  }
};

RunContext make_context(const std::string& name, const CommonArgs& args) {
  RunContext ctx;
  ctx.subcommand = name;
  ctx.config = args.resolve();
  ctx.out_dir = ctx.config.out_dir;
  fs::create_directories(ctx.out_dir);
  return ctx;
}

SweepRange default_sweep(double start, double stop, std::size_t count, bool log_scale) {
  SweepRange r;
  r.start = start;
  r.stop = stop;
  r.count = count;
  r.log_scale = log_scale;
  return r;
}

void require_three_level(const MediumParams& m) {
  if (!m.three_level())
    throw ValidationError("this subcommand requires omega_c > 0 (three-level medium)");
}

std::vector<double> detuning_grid(const RunConfig& config, double upper_factor,
                                  std::size_t count) {
  if (config.delta_p_sweep.set()) return config.delta_p_sweep.values();
  const double dpi = delta_pi(config.medium);
  return default_sweep(0.0, upper_factor * dpi, count, false).values();
}

// --- subcommand bodies ----------------------------------------------------

void run_trace(RunContext& ctx) {
  RunConfig& c = ctx.config;
  if (c.pulse.kind == PulseKind::step_on || c.pulse.kind == PulseKind::step_off)
    c.pulse.kind = PulseKind::square;
  if (c.pulse.kind == PulseKind::square && !(c.pulse.duration > 0.0))
    c.pulse.duration = default_square_duration(c.medium);
  const SpectralGrid grid =
      c.has_grid ? c.grid : SpectralGrid::recommend(c.medium, c.pulse);
  const TimeWindow window = default_time_window(c.medium, c.pulse);
  FieldTrace trace = transmit_trace(c.pulse, c.medium, grid, window, 1, c.workers);
  const std::size_t stride = std::max<std::size_t>(1, trace.size() / 200000);
  if (stride > 1) {
    FieldTrace thin = trace;
    thin.samples.clear();
    for (std::size_t i = 0; i < trace.size(); i += stride)
      thin.samples.push_back(trace.samples[i]);
    thin.dt = trace.dt * double(stride);
    trace = std::move(thin);
  }
  write_trace_csv(ctx.file("trace.csv").string(), trace);
  PlotSeries intensity{"intensity", {}, {}};
  PlotSeries envelope{"incident", {}, {}};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    intensity.xs.push_back(trace.time_at(i));
    intensity.ys.push_back(trace.intensity_at(i));
    envelope.xs.push_back(trace.time_at(i));
    envelope.ys.push_back(trace.pulse.envelope(trace.time_at(i)));
  }
  write_svg_lines(ctx.file("trace.svg").string(), "transmitted intensity",
                  "t (1/gamma21)", "I/I_i", {intensity, envelope});
  ctx.write_metadata({{"edge_residual", trace.edge_residual},
                      {"grid_span", trace.grid.span},
                      {"grid_n_points", trace.grid.n_points}});
}

void run_fringe(RunContext& ctx) {
  RunConfig& c = ctx.config;
  require_three_level(c.medium);
  if (c.pulse.kind == PulseKind::square && !(c.pulse.duration > 0.0))
    c.pulse.duration = default_square_duration(c.medium);
  const auto detunings = detuning_grid(c, 3.0, 121);
  const FringeScan scan = fringe_scan(c.medium, c.pulse, detunings, c.workers);
  write_fringe_csv(ctx.file("fringe.csv").string(), scan);
  PlotSeries s{"I(0+)", scan.detunings, scan.i0plus};
  write_svg_lines(ctx.file("fringe.svg").string(), "extinction fringes",
                  "delta_p (gamma21)", "I(0+)", {s});
  const FlashMetrics metrics = fringe_metrics(scan);
  ctx.write_metadata({{"i_max", metrics.i_max},
                      {"i_min", metrics.i_min},
                      {"contrast", metrics.contrast},
                      {"delta_pi", delta_pi(c.medium)}});
}

void run_b0map(RunContext& ctx) {
  RunConfig& c = ctx.config;
  require_three_level(c.medium);
  const SweepRange b0s =
      c.b0_sweep.set() ? c.b0_sweep : default_sweep(100.0, 400.0, 3, true);
  const auto b0_values = b0s.values();
  MediumParams base = c.medium;
  base.b0 = b0_values.front();
  std::vector<double> detunings;
  if (c.delta_p_sweep.set()) {
    detunings = c.delta_p_sweep.values();
  } else {
    detunings = default_sweep(0.0, 2.2 * delta_pi(base), 111, false).values();
  }
  const auto rows = fringe_map_vs_b0(b0_values, c.medium, c.pulse, detunings, c.workers);
  std::vector<double> values;
  values.reserve(b0_values.size() * detunings.size());
  for (const auto& row : rows)
    values.insert(values.end(), row.i0plus.begin(), row.i0plus.end());
  write_longform_csv(ctx.file("b0map.csv").string(), b0_values, detunings, values);
  write_svg_heatmap(ctx.file("b0map.svg").string(), "I(0+) vs b0 and detuning",
                    "b0", "delta_p (gamma21)", b0_values, detunings, values, true, false);
  json locs = json::array();
  for (const auto& row : rows) {
    const FlashMetrics m = fringe_metrics(row);
    locs.push_back({{"b0", row.medium.b0}, {"i_max", m.i_max}});
  }
  ctx.write_metadata({{"rows", locs}});
}

void run_modmap(RunContext& ctx) {
  RunConfig& c = ctx.config;
  require_three_level(c.medium);
  const double tau = 1.0 / c.medium.gamma21;
  const double tau_eit = group_delay(c.medium);
  const SweepRange periods = c.period_sweep.set()
                                 ? c.period_sweep
                                 : default_sweep(tau / 1000.0, 100.0 * tau_eit, 25, true);
  const auto period_values = periods.values();
  const auto detunings = detuning_grid(c, 2.0, 41);
  const ModulationMap map =
      modulation_map(c.medium, period_values, detunings, c.workers);
  write_longform_csv(ctx.file("modmap.csv").string(), map.periods, map.detunings,
                     map.values);
  write_svg_heatmap(ctx.file("modmap.svg").string(), "I(0+) vs period and detuning",
                    "T (1/gamma21)", "delta_p (gamma21)", map.periods, map.detunings,
                    map.values, true, false);
  const auto contrast = contrast_curve(map);
  std::vector<std::vector<double>> rows;
  for (const auto& cp : contrast)
    rows.push_back({cp.period, cp.i_max, cp.i_min, cp.contrast, cp.delta_at_max});
  write_table_csv(ctx.file("modmap_contrast.csv").string(),
                  {"period_gamma21", "i_max", "i_min", "contrast", "delta_at_max"}, rows);
  ctx.write_metadata();
}

void run_doppler(RunContext& ctx) {
  RunConfig& c = ctx.config;
  require_three_level(c.medium);
  if (c.medium.doppler_mode == DopplerMode::off)
    c.medium.doppler_mode = DopplerMode::copropagating;
  if (!(c.medium.wave_number_k > 0.0)) {
    const MediumParams preset = medium_preset("rubidium-d2");
    c.medium.gamma21_rad_s = preset.gamma21_rad_s;
    c.medium.wave_number_k = preset.wave_number_k;
    c.medium.atom_mass = preset.atom_mass;
    c.preset = "rubidium-d2";
  }
  const std::vector<double> temps =
      c.temperatures.empty() ? std::vector<double>{0.0, 0.1, 1.0, 50.0} : c.temperatures;
  const auto detunings = detuning_grid(c, 2.0, 81);
  const auto scans = doppler_fringe_scan(c.medium, c.pulse, temps, detunings, c.workers);
  std::vector<double> values;
  for (const auto& scan : scans)
    values.insert(values.end(), scan.i0plus.begin(), scan.i0plus.end());
  write_longform_csv(ctx.file("doppler.csv").string(), temps, detunings, values);
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < scans.size(); ++i)
    series.push_back(
        {"T = " + format_g12(temps[i]) + " K", scans[i].detunings, scans[i].i0plus});
  write_svg_lines(ctx.file("doppler.svg").string(), "Doppler effect on fringes",
                  "delta_p (gamma21)", "I(0+)", series);
  json prominences = json::array();
  for (std::size_t i = 0; i < scans.size(); ++i) {
    const FlashMetrics m = fringe_metrics(scans[i]);
    prominences.push_back({{"temperature", temps[i]},
                           {"i_max", m.i_max},
                           {"i_min", m.i_min},
                           {"contrast", m.contrast}});
  }
  ctx.write_metadata({{"per_temperature", prominences}});
}

void run_decompose(RunContext& ctx) {
  RunConfig& c = ctx.config;
  if (c.pulse.kind != PulseKind::square) c.pulse.kind = PulseKind::square;
  if (!(c.pulse.duration > 0.0)) c.pulse.duration = default_square_duration(c.medium);
  const SpectralGrid grid =
      c.has_grid ? c.grid : SpectralGrid::recommend(c.medium, c.pulse);
  const TimeWindow window = default_time_window(c.medium, c.pulse);
  const std::size_t max_rows = 50000;
  const std::size_t full = std::size_t((window.end - window.begin) / grid.dt()) + 1;
  const std::size_t stride = std::max<std::size_t>(1, full / max_rows);
  FieldTrace total = transmit_trace(c.pulse, c.medium, grid, window, stride, c.workers);
  const DecomposedFields fields = decompose(total, c.workers);
  write_decomposed_csv(ctx.file("decompose.csv").string(), fields);
  std::vector<PlotSeries> series(3);
  series[0].label = "|E_s|^2";
  series[1].label = fields.e_eit ? "|E_EIT|^2" : "";
  series[2].label = "total";
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double t = total.time_at(i);
    series[0].xs.push_back(t);
    series[0].ys.push_back(std::norm(fields.e_s.samples[i]));
    if (fields.e_eit) {
      series[1].xs.push_back(t);
      series[1].ys.push_back(std::norm(fields.e_eit->samples[i]));
    }
    series[2].xs.push_back(t);
    series[2].ys.push_back(std::norm(fields.total_at(i)));
  }
  write_svg_lines(ctx.file("decompose.svg").string(), "field decomposition",
                  "t (1/gamma21)", "intensity", series);
  ctx.write_metadata();
}

void run_delay(RunContext& ctx) {
  RunConfig& c = ctx.config;
  require_three_level(c.medium);
  c.pulse.kind = PulseKind::square;
  if (!(c.pulse.duration > 0.0)) c.pulse.duration = default_square_duration(c.medium);
  const SpectralGrid grid =
      c.has_grid ? c.grid : SpectralGrid::recommend(c.medium, c.pulse);
  const TimeWindow window = default_time_window(c.medium, c.pulse);
  const std::size_t full = std::size_t((window.end - window.begin) / grid.dt()) + 1;
  const std::size_t stride = std::max<std::size_t>(1, full / 100000);
  const FieldTrace trace = transmit_trace(c.pulse, c.medium, grid, window, stride, c.workers);
  const double formula = group_delay(c.medium);
  const double threshold = measure_group_delay(trace, DelayEstimator::threshold_crossing);
  const double centroid = measure_group_delay(trace, DelayEstimator::derivative_centroid);
  write_table_csv(ctx.file("delay.csv").string(),
                  {"b0", "omega_c", "tau_eit_formula", "tau_measured_threshold",
                   "tau_measured_centroid"},
                  {{c.medium.b0, c.medium.omega_c, formula, threshold, centroid}});
  PlotSeries s{"intensity", {}, {}};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    s.xs.push_back(trace.time_at(i));
    s.ys.push_back(trace.intensity_at(i));
  }
  write_svg_lines(ctx.file("delay.svg").string(), "slow-light rise", "t (1/gamma21)",
                  "I/I_i", {s});
  ctx.write_metadata({{"tau_eit_formula", formula},
                      {"tau_measured_threshold", threshold},
                      {"tau_measured_centroid", centroid}});
}

void run_decay(RunContext& ctx) {
  RunConfig& c = ctx.config;
  const SweepRange b0s =
      c.b0_sweep.set() ? c.b0_sweep : default_sweep(50.0, 400.0, 4, true);
  const auto b0_values = b0s.values();
  std::vector<std::vector<double>> rows;
  std::vector<PlotSeries> series(1);
  series[0].label = "tau_fit";
  for (double b0 : b0_values) {
    MediumParams m = c.medium;
    m.b0 = b0;
    m.omega_c = 0.0;  // flash decay is a two-level quantity
    const double tau_f = flash_time_scale(m);
    const PulseSpec pulse = PulseSpec::make_step_off(c.pulse.delta_p);
    const FieldTrace trace =
        quadrature_trace(pulse, m, tau_f / 10.0, 3.0 * tau_f, 64, c.workers);
    const double tau_fit = fit_flash_decay(trace, tau_f / 10.0, 3.0 * tau_f);
    rows.push_back({b0, tau_fit});
    series[0].xs.push_back(b0);
    series[0].ys.push_back(tau_fit);
  }
  write_table_csv(ctx.file("decay.csv").string(), {"b0", "tau_fit_gamma21"}, rows);
  write_svg_lines(ctx.file("decay.svg").string(), "flash decay time vs b0", "b0",
                  "tau_fit (1/gamma21)", series, true, true);
  // log-log slope
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& row : rows) {
    const double x = std::log(row[0]), y = std::log(row[1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(rows.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  ctx.write_metadata({{"loglog_slope", slope}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transient probe transmission simulator for optically thick "
               "two-level and lambda media"};
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, void (*)(RunContext&)>> commands = {
      {"trace", run_trace},       {"fringe", run_fringe},   {"b0map", run_b0map},
      {"modmap", run_modmap},     {"doppler", run_doppler}, {"decompose", run_decompose},
      {"delay", run_delay},       {"decay", run_decay},
  };

  std::vector<std::unique_ptr<CommonArgs>> args_store;
  std::vector<std::pair<CLI::App*, std::size_t>> subs;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    CLI::App* sub = app.add_subcommand(commands[i].first, "");
    args_store.push_back(std::make_unique<CommonArgs>());
    args_store.back()->add_to(sub);
    subs.push_back({sub, i});
  }

  CLI11_PARSE(app, argc, argv);

  for (const auto& [sub, idx] : subs) {
    if (!sub->parsed()) continue;
    try {
      RunContext ctx = make_context(commands[idx].first, *args_store[idx]);
      commands[idx].second(ctx);
      return 0;
    } catch (const ValidationError& e) {
      std::cerr << error_record_json("config", e.what()) << std::endl;
      return 2;
    } catch (const NumericalError& e) {
      std::cerr << error_record_json("numerical", e.what()) << std::endl;
      return 3;
    } catch (const std::exception& e) {
      std::cerr << error_record_json("internal", e.what()) << std::endl;
      return 3;
    }
  }
  return 2;
}
