#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "eitflash/errors.hpp"
#include "eitflash/output.hpp"

using namespace eitflash;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmpdir() {
  const fs::path dir = fs::temp_directory_path() / "eitflash_output_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("12-significant-digit formatting") {
  CHECK(format_g12(1.0) == "1");
  CHECK(format_g12(0.1) == "0.1");
  CHECK(format_g12(3.14159265358979) == "3.14159265359");
  CHECK(format_g12(1e-20) == "1e-20");
}

TEST_CASE("trace CSV schema") {
  FieldTrace tr;
  tr.t0 = 0.0;
  tr.dt = 0.5;
  tr.samples = {{1.0, 0.0}, {0.5, -0.5}};
  const auto path = tmpdir() / "trace.csv";
  write_trace_csv(path.string(), tr);
  const std::string text = slurp(path);
  CHECK(text.rfind("t_gamma21,re_E,im_E,intensity\n", 0) == 0);
  CHECK(text.find("0.5,0.5,-0.5,0.5\n") != std::string::npos);
}

TEST_CASE("fringe CSV schema") {
  FringeScan scan;
  scan.medium.b0 = 200.0;
  scan.medium.omega_c = 0.5;
  scan.detunings = {0.0, 0.001};
  scan.i0plus = {0.0, 1.5};
  const auto path = tmpdir() / "fringe.csv";
  write_fringe_csv(path.string(), scan);
  const std::string text = slurp(path);
  CHECK(text.rfind("delta_p_gamma21,delta_p_over_delta_pi,i0plus\n", 0) == 0);
}

TEST_CASE("long-form CSV schema and size checking") {
  const std::vector<double> xs = {1.0, 2.0};
  const std::vector<double> ys = {10.0, 20.0, 30.0};
  const std::vector<double> vals = {1, 2, 3, 4, 5, 6};
  const auto path = tmpdir() / "map.csv";
  write_longform_csv(path.string(), xs, ys, vals);
  const std::string text = slurp(path);
  CHECK(text.rfind("x,y,value\n", 0) == 0);
  CHECK(text.find("2,30,6\n") != std::string::npos);
  const std::vector<double> short_vals = {1, 2};
  CHECK_THROWS_AS(write_longform_csv(path.string(), xs, ys, short_vals), ValidationError);
}

TEST_CASE("svg plots are written") {
  const auto line_path = tmpdir() / "plot.svg";
  write_svg_lines(line_path.string(), "title", "x", "y",
                  {{"a", {0.0, 1.0, 2.0}, {0.0, 1.0, 4.0}}});
  const std::string svg = slurp(line_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  const auto heat_path = tmpdir() / "heat.svg";
  write_svg_heatmap(heat_path.string(), "map", "x", "y", std::vector<double>{1.0, 10.0},
                    std::vector<double>{0.0, 1.0}, std::vector<double>{0, 1, 2, 3}, true,
                    false);
  const std::string heat = slurp(heat_path);
  CHECK(heat.rfind("<svg", 0) == 0);
  CHECK(heat.find("rect") != std::string::npos);
}

TEST_CASE("error records are single-line JSON") {
  const std::string rec = error_record_json("config", "b0 > 0\nviolated \"badly\"");
  CHECK(rec.find('\n') == std::string::npos);
  CHECK(rec == "{\"error\":\"config\",\"message\":\"b0 > 0\\nviolated \\\"badly\\\"\"}");
}
