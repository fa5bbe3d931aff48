#include "eitflash/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "eitflash/errors.hpp"

namespace eitflash {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

void write_trace_csv(const std::string& path, const FieldTrace& trace) {
  auto out = open_out(path);
  out << "t_gamma21,re_E,im_E,intensity\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_g12(trace.time_at(i)) << ',' << format_g12(trace.samples[i].real()) << ','
        << format_g12(trace.samples[i].imag()) << ',' << format_g12(trace.intensity_at(i))
        << '\n';
  }
}

void write_fringe_csv(const std::string& path, const FringeScan& scan) {
  auto out = open_out(path);
  out << "delta_p_gamma21,delta_p_over_delta_pi,i0plus\n";
  const double dpi = scan.medium.three_level() ? delta_pi(scan.medium)
                                               : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < scan.detunings.size(); ++i) {
    out << format_g12(scan.detunings[i]) << ',' << format_g12(scan.detunings[i] / dpi) << ','
        << format_g12(scan.i0plus[i]) << '\n';
  }
}

void write_longform_csv(const std::string& path, std::span<const double> xs,
                        std::span<const double> ys, std::span<const double> values) {
  if (values.size() != xs.size() * ys.size())
    throw ValidationError("long-form map size mismatch");
  auto out = open_out(path);
  out << "x,y,value\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j)
      out << format_g12(xs[i]) << ',' << format_g12(ys[j]) << ','
          << format_g12(values[i * ys.size() + j]) << '\n';
}

void write_decomposed_csv(const std::string& path, const DecomposedFields& fields) {
  auto out = open_out(path);
  out << "t_gamma21,re_E,im_E,intensity,component\n";
  auto emit = [&](const FieldTrace& trace, const char* name) {
    for (std::size_t i = 0; i < trace.size(); ++i)
      out << format_g12(trace.time_at(i)) << ',' << format_g12(trace.samples[i].real())
          << ',' << format_g12(trace.samples[i].imag()) << ','
          << format_g12(trace.intensity_at(i)) << ',' << name << '\n';
  };
  emit(fields.e_i, "incident");
  emit(fields.e_s, "scattered");
  if (fields.e_eit) emit(*fields.e_eit, "eit");
  FieldTrace total = fields.e_i;
  for (std::size_t i = 0; i < total.size(); ++i) total.samples[i] = fields.total_at(i);
  emit(total, "total");
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw ValidationError("table row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_g12(row[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// SVG plots (convenience layer; CSV is the contract)
// ---------------------------------------------------------------------------

namespace {

constexpr double kW = 840.0, kH = 560.0;
constexpr double kL = 90.0, kR = 30.0, kT = 50.0, kB = 70.0;

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double map(double v, double pix_lo, double pix_hi) const {
    double x = log ? std::log10(v) : v;
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    if (b <= a) b = a + 1.0;
    return pix_lo + (x - a) / (b - a) * (pix_hi - pix_lo);
  }
  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      const int e0 = int(std::floor(std::log10(lo)));
      const int e1 = int(std::ceil(std::log10(hi)));
      for (int e = e0; e <= e1; ++e) {
        const double v = std::pow(10.0, e);
        if (v >= lo * 0.999 && v <= hi * 1.001) out.push_back(v);
      }
      if (out.size() < 2) out = {lo, hi};
      return out;
    }
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (mag * m >= raw) {
        step = mag * m;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step)
      out.push_back(v);
    return out;
  }
};

Axis make_axis(double lo, double hi, bool log) {
  Axis ax;
  ax.log = log;
  if (log) {
    lo = std::max(lo, 1e-300);
    hi = std::max(hi, lo * 10.0);
  } else if (!(hi > lo)) {
    hi = lo + 1.0;
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

void svg_header(std::ofstream& out, const std::string& title) {
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "' viewBox='0 0 " << kW << ' ' << kH << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << kW / 2 << "' y='28' text-anchor='middle' font-size='17' "
         "font-family='sans-serif'>"
      << title << "</text>\n";
}

void svg_axes(std::ofstream& out, const Axis& ax, const Axis& ay, const std::string& xlabel,
              const std::string& ylabel) {
  out << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='"
      << kH - kT - kB << "' fill='none' stroke='black'/>\n";
  for (double v : ax.ticks()) {
    const double x = ax.map(v, kL, kW - kR);
    out << "<line x1='" << x << "' y1='" << kH - kB << "' x2='" << x << "' y2='"
        << kH - kB + 6 << "' stroke='black'/>\n"
        << "<text x='" << x << "' y='" << kH - kB + 22
        << "' text-anchor='middle' font-size='12' font-family='sans-serif'>" << tick_label(v)
        << "</text>\n";
  }
  for (double v : ay.ticks()) {
    const double y = ay.map(v, kH - kB, kT);
    out << "<line x1='" << kL - 6 << "' y1='" << y << "' x2='" << kL << "' y2='" << y
        << "' stroke='black'/>\n"
        << "<text x='" << kL - 10 << "' y='" << y + 4
        << "' text-anchor='end' font-size='12' font-family='sans-serif'>" << tick_label(v)
        << "</text>\n";
  }
  out << "<text x='" << (kL + kW - kR) / 2 << "' y='" << kH - 18
      << "' text-anchor='middle' font-size='14' font-family='sans-serif'>" << xlabel
      << "</text>\n"
      << "<text x='22' y='" << (kT + kH - kB) / 2
      << "' text-anchor='middle' font-size='14' font-family='sans-serif' transform='rotate(-90 "
         "22 "
      << (kT + kH - kB) / 2 << ")'>" << ylabel << "</text>\n";
}

}  // namespace

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x, bool log_y) {
  double xlo = std::numeric_limits<double>::max(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (log_x && !(s.xs[i] > 0.0)) continue;
      if (log_y && !(s.ys[i] > 0.0)) continue;
      xlo = std::min(xlo, s.xs[i]);
      xhi = std::max(xhi, s.xs[i]);
      ylo = std::min(ylo, s.ys[i]);
      yhi = std::max(yhi, s.ys[i]);
    }
  if (!(xhi >= xlo)) {
    xlo = 0.0;
    xhi = 1.0;
    ylo = 0.0;
    yhi = 1.0;
  }
  const Axis ax = make_axis(xlo, xhi, log_x);
  const Axis ay = make_axis(ylo, yhi, log_y);
  auto out = open_out(path);
  svg_header(out, title);
  svg_axes(out, ax, ay, xlabel, ylabel);
  std::size_t ci = 0;
  for (const auto& s : series) {
    const char* color = kPalette[ci % 6];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.4' points='";
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (log_x && !(s.xs[i] > 0.0)) continue;
      if (log_y && !(s.ys[i] > 0.0)) continue;
      out << ax.map(s.xs[i], kL, kW - kR) << ',' << ay.map(s.ys[i], kH - kB, kT) << ' ';
    }
    out << "'/>\n";
    if (!s.label.empty())
      out << "<text x='" << kW - kR - 8 << "' y='" << kT + 18 + 16 * double(ci)
          << "' text-anchor='end' font-size='12' font-family='sans-serif' fill='" << color
          << "'>" << s.label << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
}

namespace {

void viridis(double t, int& r, int& g, int& b) {
  // 5-stop approximation
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.229, 0.322, 0.546},
                                     {0.127, 0.566, 0.551},
                                     {0.369, 0.789, 0.383},
                                     {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const int k = std::min(3, int(t));
  const double f = t - k;
  r = int(255.0 * (stops[k][0] + f * (stops[k + 1][0] - stops[k][0])));
  g = int(255.0 * (stops[k][1] + f * (stops[k + 1][1] - stops[k][1])));
  b = int(255.0 * (stops[k][2] + f * (stops[k + 1][2] - stops[k][2])));
}

}  // namespace

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel,
                       std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> values, bool log_x, bool log_y) {
  if (values.size() != xs.size() * ys.size())
    throw ValidationError("heatmap size mismatch");
  double vlo = std::numeric_limits<double>::max(), vhi = -vlo;
  for (double v : values) {
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
  }
  if (!(vhi > vlo)) vhi = vlo + 1.0;
  const Axis ax = make_axis(xs.front(), xs.back(), log_x);
  const Axis ay = make_axis(ys.front(), ys.back(), log_y);
  auto out = open_out(path);
  svg_header(out, title);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x0 = ax.map(i == 0 ? xs[0] : 0.5 * (xs[i - 1] + xs[i]), kL, kW - kR);
    const double x1 =
        ax.map(i + 1 == xs.size() ? xs.back() : 0.5 * (xs[i] + xs[i + 1]), kL, kW - kR);
    for (std::size_t j = 0; j < ys.size(); ++j) {
      const double y0 = ay.map(j == 0 ? ys[0] : 0.5 * (ys[j - 1] + ys[j]), kH - kB, kT);
      const double y1 =
          ay.map(j + 1 == ys.size() ? ys.back() : 0.5 * (ys[j] + ys[j + 1]), kH - kB, kT);
      int r, g, b;
      viridis((values[i * ys.size() + j] - vlo) / (vhi - vlo), r, g, b);
      out << "<rect x='" << std::min(x0, x1) << "' y='" << std::min(y0, y1) << "' width='"
          << std::abs(x1 - x0) + 0.5 << "' height='" << std::abs(y1 - y0) + 0.5
          << "' fill='rgb(" << r << ',' << g << ',' << b << ")'/>\n";
    }
  }
  svg_axes(out, ax, ay, xlabel, ylabel);
  out << "</svg>\n";
}

std::string error_record_json(const std::string& kind, const std::string& message) {
  auto escape = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      if (c == '\n') {
        out += "\\n";
        continue;
      }
      out += c;
    }
    return out;
  };
  return "{\"error\":\"" + escape(kind) + "\",\"message\":\"" + escape(message) + "\"}";
}

}  // namespace eitflash
