#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "concentra/config.hpp"
#include "concentra/errors.hpp"
#include "concentra/report.hpp"
#include "concentra/runner.hpp"

using namespace concentra;

namespace {

struct Overrides {
  std::string config;
  std::optional<int> N, order;
  std::optional<std::uint64_t> seed;
  std::string geometry, eps_list, levels, out, formats;
};

RunConfig resolve(const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConcentraError(ErrorKind::Io, "cannot open config '" + o.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    j = parse_config_text(ss.str());
  }
  if (o.N) {
    j.erase("dims");
    j["N"] = *o.N;
    // a bare builtin name follows N
    if (j.contains("geometry") && j["geometry"].is_string() && j["geometry"].get<std::string>().find('(') == std::string::npos)
      j["geometry"] = j["geometry"].get<std::string>() + "(" + std::to_string(*o.N + 1) + ")";
  }
  if (!o.geometry.empty()) {
    GeometryConfig g = parse_geometry_spec(o.geometry);
    std::string spec = o.geometry;
    if (g.n < 0) {
      int N = o.N ? *o.N : 7;
      if (!o.N && j.contains("N") && j["N"].is_number_integer()) N = j["N"].get<int>();
      if (!o.N && j.contains("dims") && j["dims"].contains("N")) N = j["dims"]["N"].get<int>();
      spec = g.name + "(" + std::to_string(N + 1) + ")";
    }
    j["geometry"] = spec;
  }
  if (o.order) j["expansion"]["order"] = *o.order;
  if (!o.eps_list.empty()) j["expansion"]["eps_list"] = parse_number_list(o.eps_list);
  if (!o.levels.empty()) j["spectrum"]["levels"] = o.levels;
  if (!o.out.empty()) j["output"]["directory"] = o.out;
  if (!o.formats.empty()) j["output"]["formats"] = o.formats;
  if (o.seed) j["seed"] = *o.seed;
  RunConfig cfg = config_from_json(j);
  cfg.validate();
  return cfg;
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << error_json(kind, message, code).dump() << std::endl;
  return code;
}

// 0 when every check passes, 3 when a check fails
int emit(const RunReport& rep, const RunConfig& cfg) {
  for (const auto& path : emit_report(rep, cfg)) std::cout << path << "\n";
  for (const auto& c : rep.checks)
    if (!c.pass) std::cout << "FAILED CHECK [" << rep.subcommand << "] " << c.name << ": " << c.value << "\n";
  std::cout << rep.subcommand << ": " << (rep.pass() ? "pass" : "fail") << std::endl;
  return rep.pass() ? 0 : 3;
}

int run_all(const RunConfig& cfg) {
  RunReport summary;
  summary.subcommand = "all";
  summary.config = cfg.to_json();
  summary.seed = cfg.seed;
  nlohmann::json parts = nlohmann::json::array();
  int code = 0;
  for (const auto& name : subcommands()) {
    if (name == "all") continue;
    try {
      const RunReport rep = run_subcommand(name, cfg);
      const int c = emit(rep, cfg);
      parts.push_back({{"subcommand", name}, {"pass", rep.pass()}, {"exit_code", c}});
      summary.check(name, c, 0.0, "exit code ==", c == 0);
      if (c && !code) code = c;
    } catch (const ConcentraError& e) {
      const int c = exit_code_for(e.kind());
      fail(error_kind_name(e.kind()), e.what(), c);
      parts.push_back({{"subcommand", name},
                       {"pass", false},
                       {"exit_code", c},
                       {"error", {{"kind", error_kind_name(e.kind())}, {"message", e.what()}}}});
      summary.check(name, c, 0.0, "exit code ==", false);
      if (!code) code = c;
    }
  }
  summary.payload = {{"subcommands", parts}};
  for (const auto& path : emit_report(summary, cfg)) std::cout << path << "\n";
  std::cout << "all: " << (code == 0 ? "pass" : "fail") << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"concentra: boundary-concentration numerics"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config, "run file (key-value or JSON)");
  app.add_option("--N", o.N, "boundary dimension N (>= 7)");
  app.add_option("--geometry", o.geometry, "builtin geometry, e.g. perturbed_sphere(8, 0.1) or flat");
  app.add_option("--order", o.order, "expansion order I");
  app.add_option("--eps-list", o.eps_list, "comma-separated, strictly decreasing");
  app.add_option("--levels", o.levels, "dyadic levels, e.g. 6..12");
  app.add_option("--seed", o.seed, "seed for randomized checks");
  app.add_option("--out", o.out, "output directory (CONCENTRA_OUT takes precedence)");
  app.add_option("--formats", o.formats, "json, csv or json,csv");
  const std::vector<std::pair<std::string, std::string>> help{
      {"constants", "bubble constants and eigenpair"},
      {"identities", "integral identity suite"},
      {"mu0", "curvature average and mu0 along K"},
      {"expand", "layer expansion over an eps sweep"},
      {"spectrum", "reduced eigenvalue curves"},
      {"gaps", "resonance gaps on dyadic levels"},
      {"all", "every subcommand in turn"}};
  for (const auto& [name, text] : help) app.add_subcommand(name, text);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = resolve(o);
    if (name == "all") return run_all(cfg);
    return emit(run_subcommand(name, cfg), cfg);
  } catch (const ConcentraError& e) {
    return fail(error_kind_name(e.kind()), e.what(), exit_code_for(e.kind()));
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 3);
  }
}
