#ifndef CONCENTRA_CONFIG_HPP
#define CONCENTRA_CONFIG_HPP

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "concentra/geometry.hpp"

namespace concentra {

struct GeometryConfig {
  std::string name = "perturbed_sphere";  // round_sphere, spheroid_equator, flat, perturbed_sphere, synthetic
  int n = 8;
  double amp = 0.1;
  double aspect = 2.0;
  double L = 2.0 * M_PI;
  nlohmann::json synthetic;  // H_fourier / R_fourier / Gamma_fourier, g_tilde, R_from_gauss
};

struct SolverConfig {
  double r_weight = 4.0;
  double sigma = 0.5;
  double R_max = 200.0;
  double h = 0.05;
  int n_theta = 12;
};

struct ExpansionConfig {
  int order = 1;
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  double gamma = 0.75;
  int y_nodes = 16;
};

struct SpectrumConfig {
  int level_lo = 6, level_hi = 12;
  double c_target = 0.1;
  int J = 40;
  int sigma_points = 256;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"json", "csv"};
};

struct RunConfig {
  int N = 7;
  int grid = 128;
  GeometryConfig geometry;
  SolverConfig solver;
  ExpansionConfig expansion;
  SpectrumConfig spectrum;
  OutputConfig output;
  std::uint64_t seed = 20240601;

  // throws ConcentraError(Validation) naming the violated invariant
  void validate() const;
  nlohmann::json to_json() const;
};

// Key-value text: `key = value` lines, `name {` ... `}` blocks, `#` comments. Values are JSON literals
// when they parse as such, otherwise bare strings. A file whose first non-blank character is `{` is read as JSON.
nlohmann::json parse_config_text(const std::string& text);
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// "round_sphere(8)", "perturbed_sphere(8, 0.1)", "spheroid_equator(8, 2)", "flat(8)"
GeometryConfig parse_geometry_spec(const std::string& spec);
CurvatureData build_geometry(const RunConfig& cfg);

// "6..12" or "9"
std::pair<int, int> parse_level_range(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);

}  // namespace concentra

#endif
