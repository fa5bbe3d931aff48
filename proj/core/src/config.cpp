#include "eitflash/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eitflash/errors.hpp"

namespace eitflash {

std::vector<double> SweepRange::values() const {
  if (count < 2) throw ValidationError("sweep counts >= 2");
  if (!(stop > start)) throw ValidationError("sweep stop > start");
  std::vector<double> out(count);
  if (log_scale) {
    if (!(start > 0.0)) throw ValidationError("log sweep requires start > 0");
    const double ratio = std::log(stop / start);
    for (std::size_t i = 0; i < count; ++i)
      out[i] = start * std::exp(ratio * double(i) / double(count - 1));
  } else {
    for (std::size_t i = 0; i < count; ++i)
      out[i] = start + (stop - start) * double(i) / double(count - 1);
  }
  out.back() = stop;
  return out;
}

void RunConfig::validate() const {
  medium.validate();
  pulse.validate();
  if (workers < 0) throw ValidationError("workers >= 0");
  if (out_dir.empty()) throw ValidationError("output dir must not be empty");
  if (has_grid) grid.validate(medium, pulse);
  for (double t : temperatures)
    if (t < 0.0) throw ValidationError("temperature >= 0");
}

double default_square_duration(const MediumParams& medium) {
  return medium.three_level() ? 4.0 * group_delay(medium) : 2000.0 / medium.gamma21;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + value + "' for key '" + key + "'", line);
  }
}

std::size_t parse_size(const std::string& value, const std::string& key, int line) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size() || v < 0) throw std::invalid_argument(value);
    return std::size_t(v);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + value + "' for key '" + key + "'", line);
  }
}

bool parse_scale(const std::string& value, const std::string& key, int line) {
  if (value == "linear") return false;
  if (value == "log") return true;
  throw ConfigError("invalid scale '" + value + "' for key '" + key + "' (linear|log)", line);
}

std::vector<double> parse_list(const std::string& value, const std::string& key, int line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, key, line));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'", line);
  return out;
}

struct ConfigBuilder {
  RunConfig config;

  void apply(const std::string& section, const std::string& key, const std::string& value,
             int line) {
    if (section == "medium") {
      apply_medium(key, value, line);
    } else if (section == "pulse") {
      apply_pulse(key, value, line);
    } else if (section == "grid") {
      apply_grid(key, value, line);
    } else if (section == "sweep") {
      apply_sweep(key, value, line);
    } else if (section == "output") {
      apply_output(key, value, line);
    } else {
      throw ConfigError("unknown section '" + section + "'", line);
    }
  }

  void apply_medium(const std::string& key, const std::string& value, int line) {
    auto& m = config.medium;
    if (key == "b0") m.b0 = parse_double(value, key, line);
    else if (key == "gamma31") m.gamma31 = parse_double(value, key, line);
    else if (key == "omega_c") m.omega_c = parse_double(value, key, line);
    else if (key == "delta_c") m.delta_c = parse_double(value, key, line);
    else if (key == "gamma21_rad_s") m.gamma21_rad_s = parse_double(value, key, line);
    else if (key == "wave_number_k") m.wave_number_k = parse_double(value, key, line);
    else if (key == "atom_mass") m.atom_mass = parse_double(value, key, line);
    else if (key == "temperature") m.temperature = parse_double(value, key, line);
    else if (key == "doppler_mode") {
      if (value == "off") m.doppler_mode = DopplerMode::off;
      else if (value == "simple_shift") m.doppler_mode = DopplerMode::simple_shift;
      else if (value == "copropagating") m.doppler_mode = DopplerMode::copropagating;
      else throw ConfigError("invalid doppler_mode '" + value + "'", line);
    } else if (key == "preset") {
      const MediumParams base = medium_preset(value);
      m.gamma21_rad_s = base.gamma21_rad_s;
      m.wave_number_k = base.wave_number_k;
      m.atom_mass = base.atom_mass;
      config.preset = value;
    } else {
      throw ConfigError("unknown key 'medium." + key + "'", line);
    }
  }

  void apply_pulse(const std::string& key, const std::string& value, int line) {
    auto& p = config.pulse;
    if (key == "kind") {
      if (value == "step_on") p.kind = PulseKind::step_on;
      else if (value == "step_off") p.kind = PulseKind::step_off;
      else if (value == "square") p.kind = PulseKind::square;
      else if (value == "periodic_square") p.kind = PulseKind::periodic_square;
      else throw ConfigError("invalid pulse kind '" + value + "'", line);
    } else if (key == "delta_p") {
      p.delta_p = parse_double(value, key, line);
    } else if (key == "duration") {
      p.duration = parse_double(value, key, line);
      config.duration_set = true;
    } else if (key == "period") {
      p.period = parse_double(value, key, line);
    } else if (key == "switch_time") {
      p.switch_time = parse_double(value, key, line);
    } else {
      throw ConfigError("unknown key 'pulse." + key + "'", line);
    }
  }

  void apply_grid(const std::string& key, const std::string& value, int line) {
    if (key == "span") {
      config.grid.span = parse_double(value, key, line);
      config.has_grid = true;
    } else if (key == "n_points") {
      config.grid.n_points = parse_size(value, key, line);
      config.has_grid = true;
    } else {
      throw ConfigError("unknown key 'grid." + key + "'", line);
    }
  }

  void apply_sweep(const std::string& key, const std::string& value, int line) {
    auto& c = config;
    if (key == "delta_p_start") c.delta_p_sweep.start = parse_double(value, key, line);
    else if (key == "delta_p_stop") c.delta_p_sweep.stop = parse_double(value, key, line);
    else if (key == "delta_p_count") c.delta_p_sweep.count = parse_size(value, key, line);
    else if (key == "delta_p_scale") c.delta_p_sweep.log_scale = parse_scale(value, key, line);
    else if (key == "period_start") c.period_sweep.start = parse_double(value, key, line);
    else if (key == "period_stop") c.period_sweep.stop = parse_double(value, key, line);
    else if (key == "period_count") c.period_sweep.count = parse_size(value, key, line);
    else if (key == "period_scale") c.period_sweep.log_scale = parse_scale(value, key, line);
    else if (key == "b0_start") c.b0_sweep.start = parse_double(value, key, line);
    else if (key == "b0_stop") c.b0_sweep.stop = parse_double(value, key, line);
    else if (key == "b0_count") c.b0_sweep.count = parse_size(value, key, line);
    else if (key == "b0_scale") c.b0_sweep.log_scale = parse_scale(value, key, line);
    else if (key == "temperatures") c.temperatures = parse_list(value, key, line);
    else throw ConfigError("unknown key 'sweep." + key + "'", line);
  }

  void apply_output(const std::string& key, const std::string& value, int line) {
    if (key == "dir") config.out_dir = value;
    else if (key == "workers") config.workers = int(parse_size(value, key, line));
    else if (key == "seed") config.seed = parse_size(value, key, line);
    else throw ConfigError("unknown key 'output." + key + "'", line);
  }
};

void apply_overrides(ConfigBuilder& builder, const std::vector<KeyValue>& overrides) {
  for (const auto& [dotted, value] : overrides) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos)
      throw ConfigError("override key '" + dotted + "' must be section.key");
    builder.apply(dotted.substr(0, dot), dotted.substr(dot + 1), trim(value), 0);
  }
}

RunConfig finish(ConfigBuilder& builder) {
  RunConfig& config = builder.config;
  if (config.pulse.kind == PulseKind::square && !config.duration_set)
    config.pulse.duration = default_square_duration(config.medium);
  config.validate();
  return config;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::vector<KeyValue>& overrides) {
  ConfigBuilder builder;
  std::stringstream stream(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section != "medium" && section != "pulse" && section != "grid" &&
          section != "sweep" && section != "output")
        throw ConfigError("unknown section '" + section + "'", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
    if (section.empty()) throw ConfigError("key before any [section]", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    builder.apply(section, key, value, line_no);
  }
  apply_overrides(builder, overrides);
  return finish(builder);
}

RunConfig parse_config(const std::string& path, const std::vector<KeyValue>& overrides) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str(), overrides);
}

RunConfig config_from_overrides(const std::vector<KeyValue>& overrides) {
  ConfigBuilder builder;
  apply_overrides(builder, overrides);
  return finish(builder);
}

namespace {
std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

std::string config_to_ini(const RunConfig& c) {
  std::ostringstream out;
  out << "[medium]\n";
  if (!c.preset.empty()) out << "preset = " << c.preset << "\n";
  out << "b0 = " << fmt_value(c.medium.b0) << "\n"
      << "gamma31 = " << fmt_value(c.medium.gamma31) << "\n"
      << "omega_c = " << fmt_value(c.medium.omega_c) << "\n"
      << "delta_c = " << fmt_value(c.medium.delta_c) << "\n"
      << "temperature = " << fmt_value(c.medium.temperature) << "\n";
  if (c.medium.gamma21_rad_s > 0.0)
    out << "gamma21_rad_s = " << fmt_value(c.medium.gamma21_rad_s) << "\n";
  if (c.medium.wave_number_k > 0.0)
    out << "wave_number_k = " << fmt_value(c.medium.wave_number_k) << "\n";
  if (c.medium.atom_mass > 0.0) out << "atom_mass = " << fmt_value(c.medium.atom_mass) << "\n";
  const char* mode = c.medium.doppler_mode == DopplerMode::off             ? "off"
                     : c.medium.doppler_mode == DopplerMode::simple_shift ? "simple_shift"
                                                                          : "copropagating";
  out << "doppler_mode = " << mode << "\n\n";

  out << "[pulse]\n";
  const char* kind = c.pulse.kind == PulseKind::step_on        ? "step_on"
                     : c.pulse.kind == PulseKind::step_off     ? "step_off"
                     : c.pulse.kind == PulseKind::square       ? "square"
                                                               : "periodic_square";
  out << "kind = " << kind << "\n"
      << "delta_p = " << fmt_value(c.pulse.delta_p) << "\n";
  if (c.pulse.kind == PulseKind::square)
    out << "duration = " << fmt_value(c.pulse.duration) << "\n";
  if (c.pulse.kind == PulseKind::periodic_square)
    out << "period = " << fmt_value(c.pulse.period) << "\n";
  out << "switch_time = " << fmt_value(c.pulse.switch_time) << "\n";

  if (c.has_grid) {
    out << "\n[grid]\n"
        << "span = " << fmt_value(c.grid.span) << "\n"
        << "n_points = " << c.grid.n_points << "\n";
  }

  out << "\n[sweep]\n";
  auto emit_sweep = [&](const char* name, const SweepRange& r) {
    if (!r.set()) return;
    out << name << "_start = " << fmt_value(r.start) << "\n"
        << name << "_stop = " << fmt_value(r.stop) << "\n"
        << name << "_count = " << r.count << "\n"
        << name << "_scale = " << (r.log_scale ? "log" : "linear") << "\n";
  };
  emit_sweep("delta_p", c.delta_p_sweep);
  emit_sweep("period", c.period_sweep);
  emit_sweep("b0", c.b0_sweep);
  if (!c.temperatures.empty()) {
    out << "temperatures = ";
    for (std::size_t i = 0; i < c.temperatures.size(); ++i)
      out << (i ? "," : "") << fmt_value(c.temperatures[i]);
    out << "\n";
  }

  out << "\n[output]\n"
      << "dir = " << c.out_dir << "\n"
      << "workers = " << c.workers << "\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

}  // namespace eitflash
