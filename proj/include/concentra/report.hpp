#ifndef CONCENTRA_REPORT_HPP
#define CONCENTRA_REPORT_HPP

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "concentra/config.hpp"

namespace concentra {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "concentra.report/1";

struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  std::string relation;  // how value is compared with tol, e.g. "<=", ">=", "in band"
  bool pass = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string render() const;
};

struct RunReport {
  std::string subcommand;
  nlohmann::json config;
  nlohmann::json payload = nlohmann::json::object();
  nlohmann::json tolerances = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  CsvTable csv;  // empty header: no CSV artifact

  void check(const std::string& name, double value, double tol, const std::string& relation, bool pass);
  bool pass() const;
  nlohmann::json to_json() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
// {subcommand}-{16 hex digits of the config hash}
std::string report_stem(const std::string& subcommand, const nlohmann::json& config);
// CONCENTRA_OUT when set, otherwise the configured directory
std::string output_directory(const RunConfig& cfg);
// writes the requested formats; returns the paths written
std::vector<std::string> emit_report(const RunReport& report, const RunConfig& cfg);

nlohmann::json error_json(const std::string& kind, const std::string& message, int exit_code);

}  // namespace concentra

#endif
