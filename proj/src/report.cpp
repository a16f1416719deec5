#include "concentra/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "concentra/errors.hpp"

namespace concentra {

using nlohmann::json;

namespace {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConcentraError(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw ConcentraError(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

}  // namespace

std::string CsvTable::render() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

void RunReport::check(const std::string& name, double value, double tol, const std::string& relation, bool ok) {
  checks.push_back({name, value, tol, relation, ok});
}

bool RunReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

json RunReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name},
                  {"value", number_or_null(c.value)},
                  {"tol", number_or_null(c.tol)},
                  {"relation", c.relation},
                  {"pass", c.pass}});
  return json{{"schema", kReportSchema},
              {"subcommand", subcommand},
              {"config", config},
              {"provenance", {{"version", kVersion}, {"seed", seed}, {"tolerances", tolerances}}},
              {"payload", payload},
              {"checks", cs},
              {"pass", pass()}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string report_stem(const std::string& subcommand, const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
  return subcommand + "-" + buf;
}

std::string output_directory(const RunConfig& cfg) {
  const char* env = std::getenv("CONCENTRA_OUT");
  return env && *env ? std::string(env) : cfg.output.directory;
}

std::vector<std::string> emit_report(const RunReport& report, const RunConfig& cfg) {
  const std::filesystem::path dir = output_directory(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConcentraError(ErrorKind::Io, "output directory '" + dir.string() + "' is not writable");
  const std::string stem = report_stem(report.subcommand, report.config);
  std::vector<std::string> written;
  for (const auto& fmt : cfg.output.formats) {
    if (fmt == "json") {
      const auto path = dir / (stem + ".json");
      write_file(path, report.to_json().dump(2) + "\n");
      written.push_back(path.string());
    } else if (fmt == "csv" && !report.csv.header.empty()) {
      const auto path = dir / (stem + ".csv");
      write_file(path, report.csv.render());
      written.push_back(path.string());
    }
  }
  return written;
}

json error_json(const std::string& kind, const std::string& message, int exit_code) {
  return json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}};
}

}  // namespace concentra
