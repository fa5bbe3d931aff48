#pragma once

#include <span>
#include <string>
#include <vector>

#include "eitflash/analysis.hpp"
#include "eitflash/decompose.hpp"
#include "eitflash/propagate.hpp"

namespace eitflash {

// All CSV output uses 12 significant digits; writes are atomic enough for
// our purposes (single process, main thread). Headers are part of the
// documented schemas.
std::string format_g12(double v);

void write_trace_csv(const std::string& path, const FieldTrace& trace);

// Columns: delta_p_gamma21, delta_p_over_delta_pi, i0plus.
void write_fringe_csv(const std::string& path, const FringeScan& scan);

// Long-form maps: columns x, y, value.
void write_longform_csv(const std::string& path, std::span<const double> xs,
                        std::span<const double> ys, std::span<const double> values);

// Trace schema plus a trailing component column (incident/scattered/eit/total).
void write_decomposed_csv(const std::string& path, const DecomposedFields& fields);

// Small generic table (delay/decay subcommands).
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

void write_svg_lines(const std::string& path, const std::string& title,
                     const std::string& xlabel, const std::string& ylabel,
                     const std::vector<PlotSeries>& series, bool log_x = false,
                     bool log_y = false);

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel,
                       std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> values, bool log_x = false,
                       bool log_y = false);

// One-line machine-readable failure record (written to stderr by the CLI).
std::string error_record_json(const std::string& kind, const std::string& message);

}  // namespace eitflash
